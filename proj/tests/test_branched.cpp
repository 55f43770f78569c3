#include <numeric>

#include <gtest/gtest.h>

#include "khoflow/branched.hpp"
#include "khoflow/corpus.hpp"
#include "khoflow/khovanov.hpp"

using namespace khoflow;

namespace {

const Corpus& corpus() {
  static const Corpus c = Corpus::load(KHOFLOW_DEFAULT_CORPUS);
  return c;
}

BigInt det_of(const char* name) { return determinant(corpus().at(name).diagram()); }

// Fox coloring matrix: one row per crossing, one column per arc, with
// 2 * over - under_in - under_out. Its cokernel is Z + H1 of the double
// branched cover, so the two agree once one free summand is removed.
std::vector<BigInt> fox_h1(const LinkDiagram& d) {
  const auto xs = d.crossings();
  const auto labels = d.labels();
  std::vector<std::size_t> parent(labels.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i];
    return i;
  };
  for (const auto& x : xs) {
    const auto a = find(d.label_index(x[1])), b = find(d.label_index(x[3]));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::size_t> arc;
  for (std::size_t i = 0; i < labels.size(); ++i) arc.emplace(find(i), arc.size());
  const std::size_t arcs = arc.size() + static_cast<std::size_t>(d.n_unknotted());
  IntMatrix m(xs.size(), arcs);
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const auto col = [&](int label) { return arc.at(find(d.label_index(label))); };
    m(r, col(xs[r][1])) += 2;
    m(r, col(xs[r][0])) -= 1;
    m(r, col(xs[r][2])) -= 1;
  }
  std::vector<BigInt> torsion;
  std::size_t nonzero = 0;
  for (const auto& f : smith_normal_form(m)) {
    if (f != 0) ++nonzero;
    if (f != 0 && f != 1) torsion.push_back(f);
  }
  torsion.insert(torsion.end(), arcs - nonzero - 1, BigInt{0});
  return torsion;
}

BigInt product_nonzero(const std::vector<BigInt>& v) {
  BigInt p = 1;
  for (const auto& f : v) {
    if (f != 0) p *= f;
  }
  return p;
}

}  // namespace

TEST(Faces, EulerCounts) {
  EXPECT_EQ(faces(corpus().at("trefoil").diagram()).face_count(), 5u);
  EXPECT_EQ(faces(parse_pd("U(1)")).face_count(), 2u);
  EXPECT_EQ(faces(corpus().at("figure_eight").diagram()).face_count(), 6u);
}

TEST(Faces, CheckerboardIsProper) {
  for (const auto& entry : corpus().entries()) {
    const auto d = entry.diagram();
    if (d.crossing_count() == 0) continue;
    const auto fs = faces(d);
    EXPECT_EQ(fs.face_count(), d.crossing_count() + 2) << entry.name;
    for (std::size_t x = 0; x < d.crossing_count(); ++x)
      for (int p = 0; p < 4; ++p)
        EXPECT_NE(fs.color[fs.corner_face[x][p]], fs.color[fs.corner_face[x][(p + 1) % 4]]) << entry.name;
  }
}

TEST(Faces, DisconnectedDiagram) {
  try {
    faces(parse_pd("U(2)"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DisconnectedDiagram);
  }
  EXPECT_THROW(faces(parse_pd("X(1,2,2,1) U(1)")), Error);
}

TEST(Goeritz, Symmetric) {
  const auto g = goeritz_form(corpus().at("7_2").diagram());
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) EXPECT_EQ(g(r, c), g(c, r));
}

TEST(Determinant, SkeinFixtures) {
  EXPECT_EQ(det_of("7_2"), 11);
  EXPECT_EQ(det_of("L10a18"), 10);
  EXPECT_EQ(det_of("p237"), 1);
}

TEST(Determinant, KnownValues) {
  EXPECT_EQ(det_of("unknot"), 1);
  EXPECT_EQ(det_of("trefoil"), 3);
  EXPECT_EQ(det_of("figure_eight"), 5);
  EXPECT_EQ(det_of("5_2"), 7);
  EXPECT_EQ(det_of("hopf"), 2);
  EXPECT_EQ(det_of("T(3,5)"), 1);
  EXPECT_EQ(det_of("unlink2"), 0);
  EXPECT_EQ(determinant(parse_pd("X(1,2,2,1)")), 1);
}

TEST(Determinant, MirrorInvariant) {
  for (const auto& entry : corpus().entries()) {
    const auto d = entry.diagram();
    EXPECT_EQ(determinant(d), determinant(mirror(d))) << entry.name;
  }
}

TEST(Determinant, AgreesWithGradedEuler) {
  for (const auto& entry : corpus().entries()) {
    const auto d = entry.diagram();
    if (d.crossing_count() > 10) continue;
    EXPECT_EQ(determinant(d), BigInt(graded_euler_det(d))) << entry.name;
  }
}

TEST(H1DoubleCover, Examples) {
  EXPECT_EQ(h1_double_cover(corpus().at("trefoil").diagram()), std::vector<BigInt>{3});
  EXPECT_EQ(h1_double_cover(corpus().at("unlink2").diagram()), std::vector<BigInt>{0});
  EXPECT_TRUE(h1_double_cover(corpus().at("p237").diagram()).empty());
  EXPECT_TRUE(h1_double_cover(parse_pd("U(1)")).empty());
}

TEST(H1DoubleCover, UnlinkBetti) {
  for (int n = 1; n <= 6; ++n) {
    const auto h1 = h1_double_cover(parse_pd("U(" + std::to_string(n) + ")"));
    EXPECT_EQ(first_betti(h1), static_cast<std::size_t>(n - 1));
  }
}

TEST(H1DoubleCover, SplitUnionAddsFreeSummand) {
  const auto h1 = h1_double_cover(parse_pd("X(4,2,5,1) X(6,4,1,3) X(2,6,3,5) U(1)"));
  EXPECT_EQ(h1, (std::vector<BigInt>{3, 0}));
  EXPECT_EQ(determinant(parse_pd("X(4,2,5,1) X(6,4,1,3) X(2,6,3,5) U(1)")), 0);
}

TEST(H1DoubleCover, AgreesWithFoxColoringOracle) {
  for (const auto& entry : corpus().entries()) {
    const auto d = entry.diagram();
    if (d.crossing_count() == 0) continue;
    const auto h1 = h1_double_cover(d);
    EXPECT_EQ(h1, fox_h1(d)) << entry.name;
    if (first_betti(h1) == 0) {
      EXPECT_EQ(product_nonzero(h1), determinant(d)) << entry.name;
    }
  }
}

TEST(BranchedJson, Shape) {
  const auto j = branched_json(corpus().at("unlink2").diagram());
  EXPECT_EQ(j["det"], 0);
  EXPECT_EQ(j["b1"], 1);
  EXPECT_EQ(j["h1_invariant_factors"], nlohmann::json::parse("[0]"));
}
