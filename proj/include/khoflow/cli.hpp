#pragma once

// Command-line front end. run() never calls exit(); it writes to the given
// streams and returns the process exit code:
//   0 success, 2 input error, 3 internal invariant violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "khoflow/branched.hpp"
#include "khoflow/corpus.hpp"
#include "khoflow/diagram.hpp"
#include "khoflow/error.hpp"
#include "khoflow/hmr_model.hpp"
#include "khoflow/khovanov.hpp"
#include "khoflow/specseq.hpp"

#ifndef KHOFLOW_DEFAULT_CORPUS
#define KHOFLOW_DEFAULT_CORPUS "corpus/diagrams.json"
#endif

namespace khoflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

struct RunConfig {
  std::string command;
  std::optional<std::string> corpus_name;
  std::optional<std::string> pd_file;
  std::optional<std::string> model;
  std::string corpus_file = KHOFLOW_DEFAULT_CORPUS;
  bool json = false;
  bool unreduced = false;
  bool chi = false;
  std::optional<int> page;
  std::optional<std::size_t> crossing;
  std::optional<std::size_t> trunc;
  std::vector<std::size_t> dims;
};

namespace detail {

struct Input {
  std::string name;
  LinkDiagram diagram;
  std::optional<CorpusEntry> entry;
};

inline bool diagram_command(const RunConfig& c) {
  return c.command != "hmr" && !(c.command == "skein" && !c.dims.empty());
}

inline void check_config(const RunConfig& c) {
  const auto reject = [&](bool present, const char* flag) {
    if (present) fail(ErrorKind::InvalidArgument, std::string(flag) + " does not apply to '" + c.command + "'");
  };
  reject(c.page.has_value() && c.command != "ss", "--page");
  reject(c.unreduced && c.command != "ss", "--unreduced");
  reject(c.crossing.has_value() && c.command != "skein", "--crossing");
  reject(!c.dims.empty() && c.command != "skein", "--dims");
  reject(c.trunc.has_value() && c.command != "hmr", "--trunc");
  reject(c.chi && c.command != "hmr", "--chi");
  reject(c.model.has_value() && c.command != "hmr", "--model");
  if (!c.dims.empty()) {
    if (c.dims.size() != 3) fail(ErrorKind::InvalidArgument, "--dims takes exactly three values a,b,c");
    reject(c.crossing.has_value(), "--crossing with --dims");
  }
  const int sources = int(c.corpus_name.has_value()) + int(c.pd_file.has_value()) + int(c.model.has_value());
  if (c.command == "hmr") {
    if (!c.model || sources != 1) fail(ErrorKind::InvalidArgument, "'hmr' needs exactly one input: --model NAME|FILE");
  } else if (diagram_command(c)) {
    if (sources != 1) fail(ErrorKind::InvalidArgument, "'" + c.command + "' needs exactly one of --corpus or --pd");
  } else if (sources != 0) {
    fail(ErrorKind::InvalidArgument, "'skein --dims' takes no diagram input");
  }
}

inline Input load_input(const RunConfig& c) {
  if (c.corpus_name) {
    const auto corpus = Corpus::load(c.corpus_file);
    const auto& e = corpus.at(*c.corpus_name);
    return {e.name, e.diagram(), e};
  }
  std::ifstream in(*c.pd_file);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open PD file " + *c.pd_file);
  std::stringstream text;
  text << in.rdbuf();
  return {*c.pd_file, parse_pd(text.str()), std::nullopt};
}

inline HmrModel load_model(const std::string& source) {
  if (std::filesystem::is_regular_file(source)) return load_model_file(source);
  return model_library(source);
}

inline std::string bigint_string(const BigInt& v) { return v.str(); }

inline void print_bigraded(std::ostream& out, const std::string& name, const BigradedDims& dims, bool reduced) {
  out << "diagram: " << name << "\n";
  out << "reduced: " << (reduced ? "yes" : "no") << "\n";
  out << std::setw(5) << "h" << std::setw(5) << "q" << std::setw(6) << "dim" << "\n";
  for (const auto& [key, dim] : dims.dims)
    out << std::setw(5) << key.first << std::setw(5) << key.second << std::setw(6) << dim << "\n";
  out << "total: " << dims.total() << "\n";
}

inline void cmd_khovanov(const RunConfig& c, std::ostream& out) {
  const auto in = load_input(c);
  const bool reduced = c.command == "khr";
  const auto cube = build_cube(in.diagram);
  const auto dims = reduced ? khr_homology(cube) : kh_homology(cube);
  if (c.json) out << to_json(dims, in.name, reduced).dump(2) << "\n";
  else print_bigraded(out, in.name, dims, reduced);
}

inline void cmd_branched(const RunConfig& c, std::ostream& out) {
  const auto in = load_input(c);
  if (c.json) {
    auto j = branched_json(in.diagram);
    j["diagram"] = in.name;
    out << j.dump(2) << "\n";
    return;
  }
  out << "diagram: " << in.name << "\n";
  out << "det: " << bigint_string(determinant(in.diagram)) << "\n";
  if (c.command == "h1") {
    const auto h1 = h1_double_cover(in.diagram);
    out << "h1_invariant_factors:";
    if (h1.empty()) out << " (trivial)";
    for (const auto& f : h1) out << " " << bigint_string(f);
    out << "\n";
    out << "h1: ";
    if (h1.empty()) out << "0";
    for (std::size_t i = 0; i < h1.size(); ++i)
      out << (i ? " + " : "") << (h1[i] == 0 ? std::string("Z") : "Z/" + bigint_string(h1[i]));
    out << "\n";
    out << "b1: " << first_betti(h1) << "\n";
  }
}

// The spectral sequence for K starts from the cube of the mirror diagram,
// so its E2 page is Khr of the mirror.
inline void cmd_ss(const RunConfig& c, std::ostream& out) {
  const auto in = load_input(c);
  const bool reduced = !c.unreduced;
  const auto fc = from_cube(build_cube(mirror(in.diagram)), reduced);
  const int stable = stable_page(fc);
  std::vector<PageTable> pages;
  if (c.page) {
    pages.push_back(page(fc, *c.page));
  } else {
    for (int r = 1; r <= stable; ++r) pages.push_back(page(fc, r));
  }
  const auto e_inf = e_infinity(fc);
  if (c.json) {
    auto j = spectral_json(pages, e_inf);
    j["diagram"] = in.name;
    j["reduced"] = reduced;
    j["stable_page"] = stable;
    out << j.dump(2) << "\n";
    return;
  }
  out << "diagram: " << in.name << "\n";
  out << "reduced: " << (reduced ? "yes" : "no") << "\n";
  for (const auto& t : pages) {
    out << "page " << t.r << "\n";
    out << std::setw(5) << "w" << std::setw(6) << "dim" << "\n";
    for (const auto& [w, d] : t.dims) out << std::setw(5) << w << std::setw(6) << d << "\n";
    out << "total: " << t.total() << "\n";
  }
  out << "stable_page: " << stable << "\n";
  out << "e_infinity_total: " << e_inf.total() << "\n";
}

inline void cmd_hmr(const RunConfig& c, std::ostream& out) {
  const auto model = load_model(*c.model);
  const std::size_t cutoff = c.trunc.value_or(model.default_cutoff());
  const auto h = cone_homology(mapping_cone(model, cutoff));
  std::optional<std::size_t> formula;
  if (model.tower_count == 1 && model.differential.empty()) formula = euler_char_formula(model.irreducible_gradings());
  if (c.json) {
    auto j = to_json(model, h, cutoff);
    if (c.chi && formula) j["formula_abs_chi"] = *formula;
    out << j.dump(2) << "\n";
    return;
  }
  out << "model: " << model.name << "\n";
  out << "cutoff: " << cutoff << "\n";
  out << std::setw(8) << "grading" << std::setw(6) << "dim" << "\n";
  for (const auto& [g, d] : h.by_grading()) out << std::setw(8) << g << std::setw(6) << d << "\n";
  out << "total: " << h.total() << "\n";
  out << "|chi|: " << std::llabs(h.euler()) << "\n";
  if (c.chi) {
    out << std::setw(8) << "spin_c" << std::setw(6) << "dim" << std::setw(7) << "|chi|" << "\n";
    long long sum = 0;
    for (const auto& [s, d] : h.by_spin_c()) {
      const auto chi = std::llabs(h.euler(s));
      sum += chi;
      out << std::setw(8) << s << std::setw(6) << d << std::setw(7) << chi << "\n";
    }
    out << "sum |chi| over spin_c: " << sum << "\n";
    if (formula) out << "formula |chi|: " << *formula << "\n";
  }
}

inline void print_triangle(std::ostream& out, const TriangleCheck& t, std::size_t a, std::size_t b, std::size_t c) {
  out << "triangle (" << a << ", " << b << ", " << c << "): " << (t.pass ? "pass" : "fail") << "\n";
  for (const auto& v : t.violations) out << "  violation: " << v << "\n";
}

inline std::size_t to_size(const BigInt& v) {
  if (v > BigInt(std::numeric_limits<std::size_t>::max()))
    fail(ErrorKind::InvalidArgument, "determinant too large for a dimension check");
  return static_cast<std::size_t>(v);
}

inline void cmd_skein(const RunConfig& c, std::ostream& out) {
  if (!c.dims.empty()) {
    const auto t = triangle_rank_check(c.dims[0], c.dims[1], c.dims[2]);
    if (c.json) out << to_json(t, c.dims[0], c.dims[1], c.dims[2]).dump(2) << "\n";
    else print_triangle(out, t, c.dims[0], c.dims[1], c.dims[2]);
    return;
  }
  const auto in = load_input(c);
  std::optional<std::size_t> index = c.crossing;
  if (!index && in.entry && in.entry->skein) index = in.entry->skein->crossing;
  if (in.diagram.crossing_count() == 0) fail(ErrorKind::NoCrossings, "diagram has no crossings to resolve");
  if (!index) fail(ErrorKind::InvalidArgument, "'skein' needs --crossing I for diagram " + in.name);
  const auto triple = skein_triple(in.diagram, *index);
  const LinkDiagram* parts[3] = {&triple.original, &triple.one, &triple.zero};
  std::vector<BigInt> dets;
  for (const auto* d : parts) dets.push_back(determinant(*d));

  // With a known model for K2 and two-bridge resolutions, the triangle is
  // checked on HMR dimensions; otherwise on determinants.
  std::vector<std::size_t> dims;
  std::string basis = "det";
  if (in.entry && in.entry->skein && in.entry->skein->two_bridge_resolutions && in.entry->hmr_model &&
      dets[1] != 0 && dets[2] != 0) {
    const auto top = load_model(*in.entry->hmr_model);
    dims.push_back(cone_homology(mapping_cone(top)).total());
    for (int k = 1; k <= 2; ++k) {
      const auto m = model_library("two_bridge(" + bigint_string(dets[k]) + ")");
      dims.push_back(cone_homology(mapping_cone(m)).total());
    }
    basis = "hmr";
  } else {
    for (const auto& d : dets) dims.push_back(to_size(d));
  }
  const auto t = triangle_rank_check(dims[0], dims[1], dims[2]);
  if (c.json) {
    nlohmann::json pd = nlohmann::json::array(), det = nlohmann::json::array();
    for (const auto* d : parts) pd.push_back(d->to_pd());
    for (const auto& d : dets) det.push_back(bigint_json(d));
    auto tri = to_json(t, dims[0], dims[1], dims[2]);
    tri.erase("schema");
    tri["basis"] = basis;
    out << nlohmann::json{{"schema", 1}, {"diagram", in.name}, {"crossing", *index},
                          {"pd", pd},    {"dets", det},        {"triangle", tri}}
               .dump(2)
        << "\n";
    return;
  }
  static const char* labels[3] = {"K2", "K1", "K0"};
  out << "diagram: " << in.name << "\n";
  out << "crossing: " << *index << "\n";
  for (int k = 0; k < 3; ++k) out << labels[k] << ": det " << bigint_string(dets[k]) << "  " << parts[k]->to_pd() << "\n";
  out << "dets: (" << bigint_string(dets[0]) << ", " << bigint_string(dets[1]) << ", " << bigint_string(dets[2])
      << ")\n";
  out << "checked on: " << basis << "\n";
  print_triangle(out, t, dims[0], dims[1], dims[2]);
}

inline void dispatch(const RunConfig& c, std::ostream& out) {
  check_config(c);
  if (c.command == "kh" || c.command == "khr") cmd_khovanov(c, out);
  else if (c.command == "det" || c.command == "h1") cmd_branched(c, out);
  else if (c.command == "ss") cmd_ss(c, out);
  else if (c.command == "hmr") cmd_hmr(c, out);
  else if (c.command == "skein") cmd_skein(c, out);
  else fail(ErrorKind::InvalidArgument, "unknown command '" + c.command + "'");
}

inline std::string context(const RunConfig& c) {
  if (c.corpus_name) return " (diagram " + *c.corpus_name + ")";
  if (c.pd_file) return " (PD file " + *c.pd_file + ")";
  if (c.model) return " (model " + *c.model + ")";
  return "";
}

}  // namespace detail

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Khovanov, Goeritz and HMR model computations on link diagrams", "khoflow"};
  RunConfig c;
  app.add_option("command", c.command, "kh | khr | det | h1 | ss | hmr | skein")
      ->required()
      ->check(CLI::IsMember({"kh", "khr", "det", "h1", "ss", "hmr", "skein"}));
  app.add_option("--corpus", c.corpus_name, "diagram name in the corpus");
  app.add_option("--pd", c.pd_file, "file holding a PD code");
  app.add_option("--model", c.model, "library model name or model JSON file");
  app.add_option("--corpus-file", c.corpus_file, "corpus JSON file");
  app.add_flag("--json", c.json, "JSON output");
  app.add_flag("--unreduced", c.unreduced, "ss: use the unreduced cube complex");
  app.add_option("--page", c.page, "ss: page index r >= 1");
  app.add_option("--crossing", c.crossing, "skein: crossing index");
  app.add_option("--trunc", c.trunc, "hmr: tower cutoff N");
  app.add_option("--dims", c.dims, "skein: triangle check on a,b,c")->delimiter(',')->expected(1, 3);
  app.add_flag("--chi", c.chi, "hmr: per-spin-c Euler characteristics");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "khoflow: " << e.what() << "\n";
    return kExitInput;
  }
  try {
    detail::dispatch(c, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "khoflow: " << e.what() << detail::context(c) << "\n";
    return e.is_input_error() ? kExitInput : kExitInternal;
  } catch (const std::exception& e) {
    err << "khoflow: InvariantViolation: " << e.what() << detail::context(c) << "\n";
    return kExitInternal;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace khoflow::cli
