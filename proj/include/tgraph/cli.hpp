#pragma once

// Batch commands over the library and the SVG renderer of trace graphs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tgraph/bifurcation.hpp"
#include "tgraph/construction.hpp"
#include "tgraph/moves_recognition.hpp"

namespace tgraph {

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 5e-3 ? 0.0 : v);
  return buf;
}

struct SvgFrame {
  static constexpr double width = 720, height = 360, margin = 40;
  double x(double t) const { return margin + width * wrap_angle(t) / kTwoPi; }
  double x_raw(double t) const { return margin + width * t / kTwoPi; }
  double y(double z) const { return margin + height * (1.0 - z) / 2.0; }
};

}  // namespace detail

/// The torus as the square [0, 2pi) x [-1, 1) with wrap ticks on opposite sides.
inline std::string render_svg(const TraceGraph& g) {
  using detail::svg_num;
  const detail::SvgFrame f;
  const double W = f.width + 2 * f.margin, H = f.height + 2 * f.margin;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(W) << "\" height=\"" << svg_num(H)
    << "\" viewBox=\"0 0 " << svg_num(W) << " " << svg_num(H) << "\">\n";
  o << "<style>.arc{fill:none;stroke:#333;stroke-width:1.2}.label{font:9px sans-serif;fill:#06c}"
       ".sign{font:bold 10px sans-serif}.tick{stroke:#999}</style>\n";
  o << "<rect class=\"torus\" x=\"" << svg_num(f.margin) << "\" y=\"" << svg_num(f.margin) << "\" width=\""
    << svg_num(f.width) << "\" height=\"" << svg_num(f.height) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = kTwoPi * k / 4, z = -1.0 + 0.5 * k;
    const double xt = f.x_raw(t), yz = f.y(z);
    o << "<line class=\"tick\" x1=\"" << svg_num(xt) << "\" y1=\"" << svg_num(f.margin - 6) << "\" x2=\"" << svg_num(xt)
      << "\" y2=\"" << svg_num(f.margin) << "\"/>";
    o << "<line class=\"tick\" x1=\"" << svg_num(xt) << "\" y1=\"" << svg_num(f.margin + f.height) << "\" x2=\""
      << svg_num(xt) << "\" y2=\"" << svg_num(f.margin + f.height + 6) << "\"/>";
    o << "<line class=\"tick\" x1=\"" << svg_num(f.margin - 6) << "\" y1=\"" << svg_num(yz) << "\" x2=\""
      << svg_num(f.margin) << "\" y2=\"" << svg_num(yz) << "\"/>";
    o << "<line class=\"tick\" x1=\"" << svg_num(f.margin + f.width) << "\" y1=\"" << svg_num(yz) << "\" x2=\""
      << svg_num(f.margin + f.width + 6) << "\" y2=\"" << svg_num(yz) << "\"/>\n";
  }

  const bool knot = g.knot();
  for (const auto& a : g.arcs) {
    if (a.points.empty()) continue;
    std::vector<std::vector<std::pair<double, double>>> runs(1);
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      const auto& p = a.points[k];
      if (k > 0 && std::abs(wrap_angle(p.t) - wrap_angle(a.points[k - 1].t)) > kPi) runs.emplace_back();
      runs.back().push_back({f.x(p.t), f.y(p.z)});
    }
    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      o << "<polyline class=\"arc\" points=\"";
      for (std::size_t k = 0; k < run.size(); ++k) o << (k ? " " : "") << svg_num(run[k].first) << "," << svg_num(run[k].second);
      o << "\"/>\n";
    }
    const auto& mid = a.points[a.points.size() / 2];
    std::string text = a.label.display(knot);
    o << "<text class=\"label\" x=\"" << svg_num(f.x(mid.t) + 3) << "\" y=\"" << svg_num(f.y(mid.z) - 3) << "\">" << text
      << "</text>\n";
  }

  for (const auto& v : g.vertices) {
    const double x = f.x(v.t), y = f.y(v.z);
    switch (v.kind) {
      case VertexKind::TRIPLE:
        o << "<g class=\"vertex triple\"><circle cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y)
          << "\" r=\"3.5\" fill=\"#c00\"/><text class=\"sign\" x=\"" << svg_num(x + 5) << "\" y=\"" << svg_num(y + 12)
          << "\">" << (v.sign > 0 ? "+" : "-") << "</text></g>\n";
        break;
      case VertexKind::HANGING:
        o << "<circle class=\"vertex hanging\" cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y)
          << "\" r=\"3\" fill=\"#000\"/>\n";
        break;
      case VertexKind::CRITICAL:
        o << "<path class=\"vertex critical\" d=\"M" << svg_num(x - 4) << "," << svg_num(y + 3) << " L" << svg_num(x)
          << "," << svg_num(y - 3) << " L" << svg_num(x + 4) << "," << svg_num(y + 3)
          << "\" fill=\"none\" stroke=\"#080\" stroke-width=\"1.5\"/>\n";
        break;
      case VertexKind::TANGENT:
        o << "<circle class=\"vertex tangent\" cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y)
          << "\" r=\"3\" fill=\"#fff\" stroke=\"#000\"/>\n";
        break;
      case VertexKind::SEAM:
        o << "<rect class=\"vertex seam\" x=\"" << svg_num(x - 2) << "\" y=\"" << svg_num(y - 2)
          << "\" width=\"4\" height=\"4\" fill=\"#999\"/>\n";
        break;
    }
  }
  o << "</svg>\n";
  return o.str();
}

/// Occurrences of a vertex glyph class in rendered SVG text.
inline int count_glyphs(const std::string& svg, VertexKind k) {
  const std::string needle = "class=\"vertex " + [&] {
    std::string s = to_string(k);
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  }() + "\"";
  int n = 0;
  for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Commands

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;  // link or graph files
  std::string braid, braid_a, braid_b;
  int strands = 0;
  std::size_t grid_size = 4096;
  double root_tol = 1e-10;
  double loci_tol = 1e-3;
  std::uint64_t seed = 0;  // reserved: no command draws random numbers
  std::string output;  // empty: standard output
  std::string events;  // simulate: event log path
  std::string kind = "all";
  int loci_grid = 200;
  int loci_samples = 24;
  int budget = kDefaultBudget;
};

struct RunResult {
  int status = 0;
  std::string out;  // text for standard output
  std::string err;
};

inline void check_config(const RunConfig& c) {
  if (!(c.root_tol > 0) || !(c.loci_tol > 0)) throw Error("tolerances must be positive");
  if (c.grid_size < 64) throw Error("grid size must be at least 64");
  if (c.loci_grid < 2) throw Error("loci grid must be at least 2");
  if (c.loci_samples < 1) throw Error("loci samples must be positive");
  if (c.budget < 0) throw Error("budget must be non-negative");
}

namespace detail {

inline const std::string& single_input(const RunConfig& c, const char* what) {
  if (c.inputs.size() != 1) throw Error(std::string("expected one ") + what + " file");
  return c.inputs.front();
}

inline void emit(const RunConfig& c, RunResult& r, const std::string& text) {
  if (c.output.empty())
    r.out += text;
  else
    write_text_file(c.output, text);
}

inline TraceGraph graph_from(const RunConfig& c) {
  if (!c.braid.empty() || c.strands > 0) return build_from_braid(parse_braid(c.braid, c.strands));
  return load_graph(single_input(c, "trace-graph"));
}

inline std::vector<SingularityKind> kinds_from(const std::string& s) {
  if (s == "all") return all_singularity_kinds();
  static const char* roman[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"};
  for (std::size_t k = 0; k < 10; ++k)
    if (s == roman[k]) return {all_singularity_kinds()[k]};
  if (auto k = parse_singularity_kind(s)) return {*k};
  throw Error("unknown singularity kind '" + s + "'");
}

inline std::string format_report(const LocusReport& rep) {
  std::ostringstream o;
  const std::string k = to_string(rep.kind);
  o << "report " << k << " grid " << rep.grid << " tol " << format_double(rep.tol) << " flagged " << rep.flagged
    << " unexplained " << rep.unexplained.size() << " " << (rep.detected_near_loci() ? "pass" : "fail") << "\n";
  for (const auto& c : rep.curves)
    o << "curve " << k << " " << c.id << " " << (c.quoted ? "quoted" : "derived") << " expected "
      << (c.expected ? to_string(*c.expected) : "none") << " detected " << c.detected << "/" << c.samples << " "
      << (c.pass() ? "pass" : "fail") << " \"" << c.equation << "\"\n";
  o << "result " << k << " " << (rep.pass() ? "pass" : "fail") << "\n";
  return o.str();
}

}  // namespace detail

/// Runs one command. Exit status 0 on pass or EQUIVALENT, 1 on fail or DISTINCT, 2 on UNDECIDED or error.
inline RunResult run(const RunConfig& c) {
  RunResult r;
  try {
    check_config(c);
    if (c.command == "build") {
      if (c.strands < 1) throw Error("build needs --strands");
      detail::emit(c, r, format_graph(build_from_braid(parse_braid(c.braid, c.strands))));
    } else if (c.command == "simulate") {
      const auto link = load_link(detail::single_input(c, "link"));
      const auto d = arc_decomposition(link);
      EventOptions opt;
      opt.grid_size = c.grid_size;
      opt.tol = c.root_tol;
      const auto g = build_numeric(d, opt);
      const auto log = format_events(d, find_events(d, opt));
      detail::emit(c, r, format_graph(g));
      if (c.events.empty())
        r.out += log;
      else
        write_text_file(c.events, log);
    } else if (c.command == "validate") {
      const auto rep = validate_generic(detail::graph_from(c));
      std::string text;
      for (const auto& v : rep.violations) text += "violation " + v + "\n";
      for (const auto& w : rep.warnings) text += "warning " + w + "\n";
      text += rep.pass() ? "pass\n" : "fail\n";
      detail::emit(c, r, text);
      r.status = rep.pass() ? 0 : 1;
    } else if (c.command == "compare") {
      ConjugacyResult res;
      if (!c.braid_a.empty() || !c.braid_b.empty()) {
        if (c.strands < 1) throw Error("compare needs --strands with braids");
        res = conjugacy_test(parse_braid(c.braid_a, c.strands), parse_braid(c.braid_b, c.strands), c.budget);
      } else {
        if (c.inputs.size() != 2) throw Error("compare needs two braids or two trace-graph files");
        res = graphs_equivalent(load_graph(c.inputs[0]), load_graph(c.inputs[1]), c.budget);
      }
      detail::emit(c, r, to_string(res.verdict) + "\ncertificate " + res.certificate + "\n");
      r.status = res.verdict == Verdict::EQUIVALENT ? 0 : res.verdict == Verdict::DISTINCT ? 1 : 2;
    } else if (c.command == "bifurcation") {
      std::string text = "# kind curve_id a b\n";
      std::string reports;
      bool pass = true;
      for (auto kind : detail::kinds_from(c.kind)) {
        for (const auto& curve : bifurcation_loci(kind))
          for (const auto& [a, b] : locus_samples(curve, c.loci_samples))
            text += to_string(kind) + " " + curve.id + " " + format_double(a) + " " + format_double(b) + "\n";
        const auto rep = locus_consistency(kind, c.loci_grid, c.loci_tol, kDefaultModulus, c.loci_samples);
        reports += detail::format_report(rep);
        pass = pass && rep.pass();
      }
      detail::emit(c, r, text + reports);
      r.status = pass ? 0 : 1;
    } else if (c.command == "render") {
      detail::emit(c, r, render_svg(detail::graph_from(c)));
    } else {
      throw Error("unknown command '" + c.command + "'");
    }
  } catch (const std::exception& e) {
    r.status = 2;
    r.err = std::string("error: ") + e.what() + "\n";
  }
  return r;
}

}  // namespace tgraph
