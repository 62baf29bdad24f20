#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "qpyr/dof.hpp"

using namespace qpyr;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a qpyr::Error");
  return Errc::bad_input;
}

FaceVector make(std::initializer_list<std::pair<int, int>> sizes, int pinned = 0) {
  FaceVector f;
  for (const auto& [size, count] : sizes) f.counts[size] = count;
  f.pinned = pinned;
  return f;
}

}  // namespace

TEST_CASE("face census parsing") {
  const FaceVector f = FaceVector::parse("3:4,4:1");
  REQUIRE(f.counts.size() == 2);
  CHECK(f.counts.at(3) == 4);
  CHECK(f.counts.at(4) == 1);
  CHECK(f.max_size() == 4);
  CHECK(f.pin() == 4);

  CHECK(code_of([] { FaceVector::parse("3-4"); }) == Errc::bad_input);
  CHECK(code_of([] { FaceVector::parse("x:1"); }) == Errc::bad_input);
  CHECK(code_of([] { FaceVector::parse("2:3"); }) == Errc::bad_input);
  CHECK(code_of([] { FaceVector::parse("3:-1"); }) == Errc::bad_input);
  CHECK(code_of([] { FaceVector::parse("3:0"); }) == Errc::bad_input);
}

TEST_CASE("pinned face must appear in the census") {
  FaceVector f = make({{3, 4}, {4, 1}}, 5);
  CHECK(code_of([&] { f.validate(); }) == Errc::bad_input);
  f.pinned = 3;
  f.validate();
  CHECK(f.pin() == 3);
}

TEST_CASE("edge and vertex counts of the named polyhedra") {
  // counts verified by hand on the solids themselves
  const auto pyramid = counts(make({{3, 4}, {4, 1}}));
  CHECK(pyramid.e == 8);
  CHECK(pyramid.v == 5);

  const auto cube = counts(make({{4, 6}}));
  CHECK(cube.e == 12);
  CHECK(cube.v == 8);

  const auto tetrahedron = counts(make({{3, 4}}));
  CHECK(tetrahedron.e == 6);
  CHECK(tetrahedron.v == 4);

  // odd total face-size sum has no integral edge count
  CHECK(code_of([] { counts(make({{3, 1}})); }) == Errc::non_integral_count);
}

TEST_CASE("freedom and relation counts balance on the named polyhedra") {
  const DofBalance pyramid = dof_balance(make({{3, 4}, {4, 1}}));
  CHECK(pyramid.freedoms == 7);
  CHECK(pyramid.relations == 7);
  CHECK(pyramid.balanced);

  const DofBalance cube = dof_balance(make({{4, 6}}));
  CHECK(cube.freedoms == 16);
  CHECK(cube.relations == 16);
  CHECK(cube.balanced);

  const DofBalance tetrahedron = dof_balance(make({{3, 4}}));
  CHECK(tetrahedron.freedoms == 5);
  CHECK(tetrahedron.relations == 5);
  CHECK(tetrahedron.balanced);

  // pinning a triangle of the pyramid instead of the quadrilateral
  const DofBalance side = dof_balance(make({{3, 4}, {4, 1}}, 3));
  CHECK(side.freedoms == 8);
  CHECK(side.relations == 8);
  CHECK(side.balanced);
}

TEST_CASE("the balance holds for random censuses and every valid pin") {
  oracle::Rng rng(424242ULL);
  int checked = 0;
  while (checked < 10000) {
    FaceVector f;
    const int kinds = static_cast<int>(rng.integer(1, 4));
    for (int i = 0; i < kinds; ++i)
      f.counts[static_cast<int>(rng.integer(3, 12))] =
          static_cast<int>(rng.integer(0, 20));

    long long total = 0;
    int nonzero = 0;
    for (const auto& [size, count] : f.counts) {
      total += static_cast<long long>(size) * count;
      nonzero += count > 0 ? 1 : 0;
    }
    if (nonzero == 0 || total % 2 != 0) continue;

    // independent route: v from Euler's formula with f = number of faces
    long long faces = 0;
    for (const auto& [size, count] : f.counts) faces += count;
    const auto ev = counts(f);
    CHECK(ev.v == ev.e - faces + 2);

    for (const auto& [size, count] : f.counts) {
      if (count <= 0) continue;
      f.pinned = size;
      const DofBalance b = dof_balance(f);
      CHECK(b.freedoms == b.relations);
      CHECK(b.balanced);
      ++checked;
    }
  }
}
