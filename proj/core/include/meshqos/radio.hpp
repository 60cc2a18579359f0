#pragma once

#include <span>

#include "meshqos/rng.hpp"

namespace meshqos {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

// Log-distance propagation plus a capture-threshold collision rule.
// scan_duty models imperfect scanning: the probability that a listening
// node actually picks up one channel's transmission.
struct RadioModel {
  double path_loss_ref_db = 40.0;   // loss at 1 m
  double path_loss_exp = 3.0;       // log-distance exponent
  double sensitivity_dbm = -90.0;   // weakest decodable signal
  double capture_margin_db = 10.0;  // advantage needed over interference
  double scan_duty = 1.0;           // per-channel reception probability
  int airtime_us = 376;             // one advertising packet on one channel

  bool operator==(const RadioModel&) const = default;
};

// Advertising channels used by every broadcast, in transmission order.
inline constexpr int kAdvChannels[] = {37, 38, 39};

// Received signal strength at b for a transmission from a with the given
// power. Throws Error when the positions coincide (the model has no
// near-field term).
double link_rssi(const RadioModel& model, const Position& a, const Position& b,
                 double tx_power_dbm);

// Whether one channel transmission is successfully received given its
// rssi at the receiver and the rssi of every transmission overlapping it
// on the same channel. Consumes exactly one draw from rng regardless of
// the outcome so reception checks never shift the random stream.
bool reception_outcome(const RadioModel& model, double rssi_dbm,
                       std::span<const double> interferer_rssi_dbm, Rng& rng);

}  // namespace meshqos
