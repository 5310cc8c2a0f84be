#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lyapcert/types.hpp"

namespace lyapcert {

enum class Status { kPass, kFail, kSkipped };

std::string_view to_string(Status status);

/// Enough to re-run the trajectory that produced a witness.
struct TrajectoryRef {
  Point start;
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  double t = 0.0;
};

/// A point (or trajectory state) at which a check was violated, with the
/// values that violated it.
struct Witness {
  std::string check;
  Point point;
  std::vector<std::pair<std::string, double>> values;
  std::optional<TrajectoryRef> trajectory;

  double value(std::string_view key) const;
};

struct Verdict {
  static constexpr std::size_t kMaxStoredWitnesses = 16;

  Status status = Status::kPass;
  std::string reason;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t skipped_points = 0;
  // Largest violation margin seen (or the measured quantity for checks that
  // report a single number, e.g. a Lipschitz estimate).
  double worst = 0.0;
  std::vector<Witness> witnesses;

  bool passed() const noexcept { return status == Status::kPass; }
  bool failed() const noexcept { return status == Status::kFail; }

  /// Records a violation and flips the verdict to Fail. Only the first
  /// kMaxStoredWitnesses are kept; all are counted.
  void add_violation(Witness w);

  static Verdict skipped(std::string reason);
  static Verdict fail(std::string reason);
};

/// Folds b into a: counts add up, Fail dominates Pass dominates Skipped.
void merge_into(Verdict& a, const Verdict& b);

}  // namespace lyapcert
