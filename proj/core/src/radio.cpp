#include "meshqos/radio.hpp"

#include <cmath>

#include "meshqos/errors.hpp"

namespace meshqos {

double link_rssi(const RadioModel& model, const Position& a, const Position& b,
                 double tx_power_dbm) {
  const double distance = std::hypot(b.x - a.x, b.y - a.y);
  if (distance <= 0.0) {
    throw Error("link_rssi requires distinct positions");
  }
  return tx_power_dbm - model.path_loss_ref_db -
         10.0 * model.path_loss_exp * std::log10(distance);
}

bool reception_outcome(const RadioModel& model, double rssi_dbm,
                       std::span<const double> interferer_rssi_dbm, Rng& rng) {
  const bool heard = rng.uniform01() < model.scan_duty;
  if (!heard) return false;
  if (rssi_dbm < model.sensitivity_dbm) return false;
  for (double other : interferer_rssi_dbm) {
    if (rssi_dbm < other + model.capture_margin_db) return false;
  }
  return true;
}

}  // namespace meshqos
