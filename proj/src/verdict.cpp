#include "lyapcert/verdict.hpp"

#include <algorithm>
#include <limits>

namespace lyapcert {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kSkipped: return "skipped";
  }
  return "unknown";
}

double Witness::value(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void Verdict::add_violation(Witness w) {
  status = Status::kFail;
  ++violations;
  if (witnesses.size() < kMaxStoredWitnesses) witnesses.push_back(std::move(w));
}

Verdict Verdict::skipped(std::string reason) {
  Verdict v;
  v.status = Status::kSkipped;
  v.reason = std::move(reason);
  return v;
}

Verdict Verdict::fail(std::string reason) {
  Verdict v;
  v.status = Status::kFail;
  v.reason = std::move(reason);
  return v;
}

void merge_into(Verdict& a, const Verdict& b) {
  if (b.status == Status::kFail) {
    a.status = Status::kFail;
  } else if (b.status == Status::kPass && a.status == Status::kSkipped) {
    a.status = Status::kPass;
  }
  if (a.reason.empty()) a.reason = b.reason;
  a.checked += b.checked;
  a.violations += b.violations;
  a.skipped_points += b.skipped_points;
  a.worst = std::max(a.worst, b.worst);
  for (const auto& w : b.witnesses) {
    if (a.witnesses.size() >= Verdict::kMaxStoredWitnesses) break;
    a.witnesses.push_back(w);
  }
}

}  // namespace lyapcert
