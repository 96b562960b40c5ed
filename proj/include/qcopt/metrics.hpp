#pragma once

#include <cmath>
#include <vector>

#include "qcopt/consensus.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

/// Relative distance to the optimum, normalized per node by the initial
/// distance: e = sqrt( sum_i (x_i - x*)^2 / (x_i[0] - x*)^2 ).
inline double error_metric(const std::vector<Rational>& x, const std::vector<Rational>& x0,
                           const Rational& x_star) {
  if (x.size() != x0.size() || x.empty()) throw Error("error_metric: size mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Rational d0 = x0[i] - x_star;
    if (d0 == 0)
      throw DegenerateStart("node " + std::to_string(i) + " starts exactly at the optimum");
    const Rational d = x[i] - x_star;
    sum += (d * d) / (d0 * d0);
  }
  return std::sqrt(to_double(sum));
}

/// Shared-estimate variant: every node sits at the same point x_hat.
inline double error_metric(const Rational& x_hat, const std::vector<Rational>& x0,
                           const Rational& x_star) {
  return error_metric(std::vector<Rational>(x0.size(), x_hat), x0, x_star);
}

/// Closed-form total-bit count b_t = c_s * b_pm * n_tt, kept rational so
/// fractional average transmission counts multiply exactly.
inline Rational table2_row(const Rational& steps, const Rational& bits_per_message,
                           const Rational& transmissions) {
  if (steps < 0 || bits_per_message < 0 || transmissions < 0)
    throw Error("bit accounting inputs must be nonnegative");
  return steps * bits_per_message * transmissions;
}

struct LedgerEntry {
  int step = 0;
  int bits_per_message = 0;      // token message width in force
  long long transmissions = 0;   // token sends this step
  long long stopping_messages = 0;  // (M, m) broadcasts
  long long vote_messages = 0;      // 1-bit termination votes

  Int bits() const { return Int(bits_per_message) * transmissions; }
};

/// Per-run communication ledger. The headline total counts token bits only;
/// stopping broadcasts and votes sit in separate columns so the token figure
/// stays comparable across runs.
class BitLedger {
 public:
  void add(LedgerEntry entry) {
    cumulative_bits_ += entry.bits();
    entries_.push_back(std::move(entry));
  }

  const std::vector<LedgerEntry>& entries() const { return entries_; }

  Int total_bits() const { return cumulative_bits_; }

  long long total_transmissions() const {
    long long total = 0;
    for (const auto& e : entries_) total += e.transmissions;
    return total;
  }

  long long total_stopping_messages() const {
    long long total = 0;
    for (const auto& e : entries_) total += e.stopping_messages;
    return total;
  }

  long long total_vote_messages() const {
    long long total = 0;
    for (const auto& e : entries_) total += e.vote_messages;
    return total;
  }

  /// Votes cost one bit each.
  Int total_vote_bits() const { return Int(total_vote_messages()); }

  double average_transmissions() const {
    if (entries_.empty()) return 0.0;
    return static_cast<double>(total_transmissions()) / static_cast<double>(entries_.size());
  }

 private:
  std::vector<LedgerEntry> entries_;
  Int cumulative_bits_ = 0;
};

inline double measured_avg_transmissions(const std::vector<long long>& per_run_counts) {
  if (per_run_counts.empty()) throw Error("need at least one run");
  long long total = 0;
  for (long long c : per_run_counts) total += c;
  return static_cast<double>(total) / static_cast<double>(per_run_counts.size());
}

inline double measured_avg_transmissions(const std::vector<ConsensusResult>& runs) {
  std::vector<long long> counts;
  counts.reserve(runs.size());
  for (const auto& r : runs) counts.push_back(r.transmissions);
  return measured_avg_transmissions(counts);
}

}  // namespace qcopt
