#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "tgraph/construction.hpp"

using namespace tgraph;

namespace {

const SampledLink& trefoil() {
  static const SampledLink link = load_link(std::string(TGRAPH_FIXTURES_DIR) + "/trefoil.link");
  return link;
}

const TraceGraph& trefoil_graph() {
  static const TraceGraph g = build_numeric(trefoil());
  return g;
}

bool mentions(const ValidationReport& r, const std::string& clause) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.rfind(clause + ":", 0) == 0; });
}

// Midpoints between consecutive distinct vertex times.
std::vector<double> chamber_times(const TraceGraph& g) {
  std::vector<double> ts;
  for (const auto& v : g.vertices)
    if (v.kind != VertexKind::SEAM) ts.push_back(v.t);
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double a = ts[k];
    double b = ts[(k + 1) % ts.size()];
    if (b <= a) b += kTwoPi;
    out.push_back(wrap_angle(0.5 * (a + b)));
  }
  return out;
}

}  // namespace

TEST_CASE("trefoil trace graph satisfies the generic conditions") {
  const auto& g = trefoil_graph();
  const auto r = validate_generic(g);
  for (const auto& v : r.violations) UNSCOPED_INFO(v);
  CHECK(r.pass());
  CHECK(g.knot());
  CHECK(g.count(VertexKind::TRIPLE) == 4);
  CHECK(g.count(VertexKind::CRITICAL) == 4);
  CHECK(g.count(VertexKind::TANGENT) == 4);
  CHECK(g.count(VertexKind::HANGING) == 4);
  CHECK(g.count(VertexKind::SEAM) == 0);
}

TEST_CASE("every injected fault is reported by its clause") {
  const std::vector<std::pair<MutationFault, std::string>> expected{
      {MutationFault::LabelFlip, "critical-label"},   {MutationFault::DeletedHanging, "degree"},
      {MutationFault::BrokenSymmetry, "symmetry"},    {MutationFault::NonMonotonicArc, "monotonic"},
      {MutationFault::DuplicateVertexTime, "distinct-times"}, {MutationFault::BadTriplet, "triplet"}};
  for (const auto& [fault, clause] : expected) {
    INFO(to_string(fault));
    const auto r = validate_generic(inject_fault(trefoil_graph(), fault));
    CHECK_FALSE(r.pass());
    CHECK(mentions(r, clause));
  }
}

TEST_CASE("fault injection needs a suitable site") {
  CHECK_THROWS_AS(inject_fault(TraceGraph{}, MutationFault::DeletedHanging), Error);
  CHECK_THROWS_AS(inject_fault(TraceGraph{}, MutationFault::LabelFlip), Error);
}

TEST_CASE("empty trace graph") {
  TraceGraph g;
  g.structure.arcs_per_component = {1};
  g.structure.arcs.push_back({{1, 1}, 1, -1.0, 1.0, ArcEnd::Seam, ArcEnd::Seam});
  CHECK(validate_generic(g).pass());
  const auto s = slice(g, 1.0);
  CHECK(s.points.empty());
  const auto gd = slice_to_gauss(s, g.structure);
  CHECK(gd.chords.empty());
  CHECK(reconstruct_diagram(g, 1.0).crossings.empty());
}

TEST_CASE("slicing at a vertex time is rejected") {
  const auto& g = trefoil_graph();
  for (const auto& v : g.vertices) CHECK_THROWS_AS(slice(g, v.t), VertexOnSlice);
  CHECK_THROWS_AS(slice(g, g.vertices.front().t + 1e-10), VertexOnSlice);
}

TEST_CASE("slices at antipodal times are mirror images") {
  const auto& g = trefoil_graph();
  for (double t : chamber_times(g)) {
    const auto a = slice(g, t), b = slice(g, t + kPi);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      CHECK(a.points[k].z == Catch::Approx(b.points[k].z).margin(1e-9));
      CHECK(a.points[k].label == b.points[k].label.reversed());
    }
  }
}

TEST_CASE("slice Gauss diagram agrees with the projection between vertex times") {
  const auto& g = trefoil_graph();
  const auto d = arc_decomposition(trefoil());
  for (double t : chamber_times(g)) {
    INFO("t = " << t);
    const auto from_slice = slice_to_gauss(slice(g, t), g.structure);
    const auto oracle = gauss_diagram(d, project_diagram(d, t));
    CHECK(from_slice.chords.size() == oracle.chords.size());
    CHECK(equivalent(from_slice, oracle));
  }
}

TEST_CASE("slice Gauss diagram is constant inside a chamber") {
  const auto& g = trefoil_graph();
  std::vector<double> ts;
  for (const auto& v : g.vertices) ts.push_back(v.t);
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double a = ts[k], b = ts[k + 1];
    const auto g1 = slice_to_gauss(slice(g, a + 0.2 * (b - a)), g.structure);
    const auto g2 = slice_to_gauss(slice(g, a + 0.8 * (b - a)), g.structure);
    CHECK(canonical_gauss(g1) == canonical_gauss(g2));
  }
}

TEST_CASE("reconstructed diagram realizes the slice") {
  const auto& g = trefoil_graph();
  for (double t : chamber_times(g)) {
    const auto pd = reconstruct_diagram(g, t);
    const auto s = slice(g, t);
    CHECK(pd.crossings.size() == s.points.size());
    CHECK(equivalent(gauss_diagram(g.structure, pd), slice_to_gauss(s, g.structure)));
  }
}

TEST_CASE("slice with labels outside the arc structure") {
  const auto& g = trefoil_graph();
  SliceSet s;
  s.points.push_back({0.0, {{1, 1}, {1, 7}}});
  CHECK_THROWS_AS(slice_to_gauss(s, g.structure), InconsistentLabels);
  s.points = {{0.0, {{1, 2}, {1, 2}}}};
  CHECK_THROWS_AS(slice_to_gauss(s, g.structure), InconsistentLabels);
  // Arc 3 only lives on [-0.81, -0.56].
  s.points = {{0.9, {{1, 1}, {1, 3}}}};
  CHECK_THROWS_AS(slice_to_gauss(s, g.structure), InconsistentLabels);
}

TEST_CASE("single chord slice") {
  TraceGraph g;
  g.structure.arcs_per_component = {2};
  g.structure.arcs.push_back({{1, 1}, 1, -1.0, 0.5, ArcEnd::Seam, ArcEnd::Maximum});
  g.structure.arcs.push_back({{1, 2}, -1, -1.0, 0.5, ArcEnd::Maximum, ArcEnd::Seam});
  SliceSet s;
  s.points.push_back({0.0, {{1, 1}, {1, 2}}});
  const auto gd = slice_to_gauss(s, g.structure);
  REQUIRE(gd.chords.size() == 1);
  REQUIRE(gd.circles.size() == 1);
  REQUIRE(gd.circles[0].size() == 2);
  CHECK(gd.circles[0][0].over);
  CHECK_FALSE(gd.circles[0][1].over);
}

TEST_CASE("graph file round trip is exact") {
  const auto& g = trefoil_graph();
  const auto text = format_graph(g);
  const auto h = parse_graph(text);
  CHECK(h == g);
  CHECK(format_graph(h) == text);
  const auto path = (std::filesystem::temp_directory_path() / "tgraph_roundtrip.graph").string();
  save_graph(path, g);
  CHECK(load_graph(path) == g);
  std::filesystem::remove(path);
}

TEST_CASE("malformed graph files") {
  CHECK_THROWS_AS(parse_graph("VERTEX 0 TRIPLE 0 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("TRACEGRAPH 1\nCOMPONENT 1 1\nVERTEX 0 QUAD 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("TRACEGRAPH 1\nCOMPONENT 1 2\nARCINFO 1 1 1 -1 1 SEAM SEAM\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("TRACEGRAPH 1\nPOINT 0 0 0\n"), ParseError);
  try {
    parse_graph("TRACEGRAPH 1\n# comment\nCOMPONENT 1 x\n", "g.txt");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("g.txt:3") != std::string::npos);
  }
}
