#include "qpyr/dof.hpp"

#include <algorithm>
#include <sstream>

namespace qpyr {

FaceVector FaceVector::parse(const std::string& text) {
  FaceVector f;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(Errc::bad_input, "expected size:count, got '" + item + "'");
    int size = 0, count = 0;
    try {
      size = std::stoi(item.substr(0, colon));
      count = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(Errc::bad_input, "malformed face census entry '" + item + "'");
    }
    f.counts[size] += count;
  }
  f.validate();
  return f;
}

int FaceVector::max_size() const {
  int m = 0;
  for (const auto& [size, count] : counts)
    if (count > 0) m = std::max(m, size);
  return m;
}

int FaceVector::pin() const { return pinned > 0 ? pinned : max_size(); }

void FaceVector::validate() const {
  bool any = false;
  for (const auto& [size, count] : counts) {
    if (size < 3) throw Error(Errc::bad_input, "face size below 3");
    if (count < 0) throw Error(Errc::bad_input, "negative face count");
    any = any || count > 0;
  }
  if (!any) throw Error(Errc::bad_input, "empty face census");
  if (pinned > 0) {
    const auto it = counts.find(pinned);
    if (it == counts.end() || it->second <= 0)
      throw Error(Errc::bad_input, "pinned face size absent from census");
  }
}

EdgeVertexCount counts(const FaceVector& f) {
  f.validate();
  long long edge_sum = 0;    // sum i * n_i = 2e
  long long corner_sum = 0;  // sum (i - 2) * n_i = 2(v - 2)
  for (const auto& [size, count] : f.counts) {
    edge_sum += static_cast<long long>(size) * count;
    corner_sum += static_cast<long long>(size - 2) * count;
  }
  if (edge_sum % 2 != 0)
    throw Error(Errc::non_integral_count, "sum of face sizes is odd");
  return {edge_sum / 2, corner_sum / 2 + 2};
}

DofBalance dof_balance(const FaceVector& f) {
  const auto [e, v] = counts(f);
  const long long k = f.pin();
  long long extra = 0;  // sum n_i (i - 3)
  for (const auto& [size, count] : f.counts)
    extra += static_cast<long long>(count) * (size - 3);
  DofBalance b;
  b.freedoms = 2 * (k - 2) + 3 * (v - k);
  b.relations = (e - 1) + extra - (k - 3);
  b.balanced = b.freedoms == b.relations;
  return b;
}

}  // namespace qpyr
