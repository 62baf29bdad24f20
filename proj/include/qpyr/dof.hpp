#pragma once

// Degree-of-freedom bookkeeping for convex polyhedra described by a face-size
// census: n_i faces with i edges.  Pinning one face of size k in a plane
// leaves 2(k-2) + 3(v-k) coordinate freedoms against (e-1) + sum n_i (i-3) -
// (k-3) length/planarity relations; the two counts agree for every valid k.

#include <map>
#include <string>

#include "qpyr/error.hpp"

namespace qpyr {

// counts[i] = number of faces with i edges.  Valid when every size is >= 3,
// every count >= 0, and at least one count is positive.  `pinned` selects the
// face size k held fixed; 0 means "use the largest face size".
struct FaceVector {
  std::map<int, int> counts;
  int pinned = 0;

  // Parses "3:4,4:1" style census strings.  Throws Errc::bad_input.
  static FaceVector parse(const std::string& text);

  int max_size() const;
  int pin() const;  // effective k
  void validate() const;  // throws Errc::bad_input on malformed censuses
};

struct EdgeVertexCount {
  long long e = 0;
  long long v = 0;
};

// e = (1/2) sum i*n_i, v = e - f + 2.  Exact integer arithmetic; throws
// Errc::non_integral_count when sum i*n_i is odd.
EdgeVertexCount counts(const FaceVector& f);

struct DofBalance {
  long long freedoms = 0;
  long long relations = 0;
  bool balanced = false;
};

DofBalance dof_balance(const FaceVector& f);

}  // namespace qpyr
