#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "tracelab/acceptance.hpp"
#include "tracelab/generators.hpp"
#include "tracelab/json_io.hpp"
#include "tracelab/measurability.hpp"
#include "tracelab/residue.hpp"
#include "tracelab/transforms.hpp"

namespace tl = tracelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUndecidedCritical = 2;

enum class Format { json, csv, plot_data };

struct RunConfig {
  Format format = Format::json;
  double tol = tl::kDefaultTolerance;
  std::uint64_t seed = 7;
  std::string out;

  std::string example;
  std::uint64_t an_n = 1;
  std::string input;
  std::optional<std::size_t> blocks;
  std::size_t k_max = 16;
  int m_max = 8;
  std::vector<std::string> critical;

  bool raw = false;
  std::size_t length = 1024;
  std::string op;
  int m = 1;

  std::string symbol = "q-example";
  int dim = 2;
  std::vector<int> anchors;
  std::size_t residue_blocks = std::size_t{1} << 16;
  std::optional<double> power;
  std::optional<double> normalization;
  std::string profile;

  std::vector<std::string> only;
};

// The sequence an example is built from, and the operator built on top of it.
struct Source {
  std::string label;
  tl::AnySequence base;
  tl::OperatorModel op;
  std::size_t default_blocks;
};

Source load_source(const RunConfig& cfg) {
  if (!cfg.example.empty() && !cfg.input.empty()) throw tl::precondition_error("give either --example or --input");
  if (!cfg.input.empty()) {
    auto csv = tl::read_sequence_csv(cfg.input);
    auto seq = tl::sequence_from_csv(csv, cfg.input);
    auto op = std::visit(
        [&](const auto& s) { return tl::make_operator(cfg.input, tl::OperatorKind::general, s); }, seq);
    std::size_t blocks = std::visit([](const auto& s) { return s.block_horizon(); }, seq);
    return {cfg.input, seq, op, blocks};
  }
  const std::string& e = cfg.example;
  constexpr std::size_t kPointwise = std::size_t{1} << 20;
  if (e == "harmonic") {
    auto h = tl::gen_harmonic();
    return {e, h, tl::gen_diag("harmonic", h), kPointwise};
  }
  if (e == "y-dif1" || e == "y-dif2" || e == "x-alt-dyadic") {
    auto y = e == "y-dif1" ? tl::gen_y_dif1() : e == "y-dif2" ? tl::gen_y_dif2() : tl::gen_x_alt_dyadic();
    return {e, y, tl::gen_diag_of_D(y), kPointwise};
  }
  if (e == "a-n") {
    auto mu = tl::gen_an(cfg.an_n);
    return {mu.name(), mu, tl::gen_diag(mu.name(), mu), tl::kDefaultBlockHorizon};
  }
  if (e.empty()) throw tl::precondition_error("no input: give --example or --input");
  throw tl::precondition_error("unknown example '" + e + "'");
}

std::size_t blocks_for(const RunConfig& cfg, const Source& src) { return cfg.blocks.value_or(src.default_blocks); }

tl::SuchestonOptions sucheston_options(const RunConfig& cfg) {
  tl::SuchestonOptions so;
  so.k_max = cfg.k_max;
  so.k_min = std::min<std::size_t>(so.k_min, cfg.k_max);
  so.tolerance = cfg.tol;
  return so;
}

template <class T>
std::string pairs_text(const tl::Truncation<T>& x, bool header) {
  std::ostringstream os;
  os.precision(17);
  if constexpr (tl::is_complex_v<T>) {
    if (header) os << "index,re,im\n";
    for (std::size_t i = 0; i < x.size(); ++i) os << i << ',' << x[i].real() << ',' << x[i].imag() << '\n';
  } else {
    if (header) os << "index,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) os << i << ',' << x[i] << '\n';
  }
  return os.str();
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Output {
  std::string text;
  int code = kExitOk;
};

bool undecided(const std::vector<std::string>& critical, const std::string& name, bool is_undecided) {
  return is_undecided && std::find(critical.begin(), critical.end(), name) != critical.end();
}

Output cmd_classify(const RunConfig& cfg) {
  auto src = load_source(cfg);
  tl::ClassifyOptions opt;
  opt.tolerance = cfg.tol;
  opt.sucheston = sucheston_options(cfg);
  opt.iterated.m_max = cfg.m_max;
  auto d = tl::classify(src.op, blocks_for(cfg, src), opt);

  Output out;
  using S = tl::MeasurabilityStatus;
  const std::vector<std::pair<std::string, const tl::ClassVerdict*>> tests = {
      {"pt", &d.pt}, {"dixmier", &d.dixmier}, {"connes-dixmier", &d.connes_dixmier}, {"dm", &d.dm}};
  for (const auto& [name, v] : tests)
    if (undecided(cfg.critical, name, v->status == S::undecided)) out.code = kExitUndecidedCritical;

  switch (cfg.format) {
    case Format::json: out.text = tl::to_json(d).dump(2) + "\n"; break;
    case Format::plot_data: out.text = pairs_text(d.phi, false); break;
    case Format::csv: {
      std::string s = "test,status,value,spread\n";
      for (const auto& [name, v] : tests) {
        std::string value;
        if (v->value) value = d.is_complex ? number(v->value->real()) + (v->value->imag() < 0 ? "" : "+") +
                                                 number(v->value->imag()) + "i"
                                           : number(v->value->real());
        s += name + "," + tl::to_string(v->status) + "," + value + "," + number(v->spread) + "\n";
      }
      out.text = s;
      break;
    }
  }
  return out;
}

Output cmd_bounds(const RunConfig& cfg) {
  auto src = load_source(cfg);
  auto so = sucheston_options(cfg);
  Output out;
  tl::Json j;
  std::optional<tl::RealTruncation> analysed;
  if (cfg.raw) {
    const auto* base = std::get_if<tl::RealSequence>(&src.base);
    if (!base) throw tl::precondition_error("bounds --raw needs a real sequence");
    std::uint64_t n = std::min<std::uint64_t>(cfg.blocks.value_or(std::size_t{1} << 20), base->value_horizon());
    std::vector<double> v(n);
    for (std::uint64_t k = 0; k < n; ++k) v[k] = base->value_at(k);
    analysed = tl::RealTruncation(std::move(v));
    so.k_max = std::min(so.k_max, analysed->size() / 4);
    so.k_min = std::min(so.k_min, so.k_max);
    auto lz = tl::lorentz_test(*analysed, so);
    j["label"] = src.label;
    j["sequence"] = "raw";
    j["length"] = analysed->size();
    j["interval"] = tl::to_json(lz.interval);
    j["almost_convergence"] = tl::to_json(lz.verdict);
    if (undecided(cfg.critical, "pt", lz.verdict.status == tl::ConvergenceStatus::undecided))
      out.code = kExitUndecidedCritical;
  } else {
    std::size_t nb = blocks_for(cfg, src);
    auto ti = tl::trace_interval(src.op, nb, so);
    j["label"] = src.label;
    j["sequence"] = "phi";
    j["n_blocks"] = nb;
    j["interval"] = tl::to_json(ti.re);
    if (ti.im) j["interval_im"] = tl::to_json(*ti.im);
    j["warnings"] = ti.warnings;
    if (undecided(cfg.critical, "pt", ti.re.reliability != tl::Reliability::stable)) out.code = kExitUndecidedCritical;
    if (cfg.format == Format::plot_data) analysed = std::get<0>(tl::phi_parts(src.op, nb));
  }
  switch (cfg.format) {
    case Format::json: out.text = j.dump(2) + "\n"; break;
    case Format::plot_data: out.text = pairs_text(*analysed, false); break;
    case Format::csv: {
      const auto& iv = j["interval"];
      std::string s = "k,inf,sup\n";
      for (std::size_t i = 0; i < iv["k_ladder"].size(); ++i)
        s += std::to_string(iv["k_ladder"][i].get<std::size_t>()) + "," + number(iv["inf_by_k"][i].get<double>()) +
             "," + number(iv["sup_by_k"][i].get<double>()) + "\n";
      out.text = s;
      break;
    }
  }
  return out;
}

template <class T>
tl::Truncation<T> leading(const tl::BlockSequence<T>& s, std::uint64_t n) {
  n = std::min<std::uint64_t>(n, s.value_horizon());
  if (n == 0) throw tl::precondition_error("empty sequence");
  std::vector<T> v(n);
  for (std::uint64_t k = 0; k < n; ++k) v[k] = s.value_at(k);
  return tl::Truncation<T>(std::move(v));
}

Output cmd_transform(const RunConfig& cfg) {
  auto src = load_source(cfg);
  Output out;
  auto emit = [&](const auto& result) {
    switch (cfg.format) {
      case Format::json: {
        tl::Json j;
        j["label"] = src.label;
        j["op"] = cfg.op;
        j["length"] = result.size();
        tl::Json values = tl::Json::array();
        for (const auto& v : result) values.push_back(tl::to_json(std::complex<double>(v), tl::is_complex_v<std::decay_t<decltype(v)>>));
        j["values"] = values;
        out.text = j.dump(2) + "\n";
        break;
      }
      case Format::csv: out.text = pairs_text(result, true); break;
      case Format::plot_data: out.text = pairs_text(result, false); break;
    }
  };
  std::visit(
      [&](const auto& base) {
        if (cfg.op == "phi") {
          emit(tl::block_sums_phi(base, cfg.blocks.value_or(std::min<std::size_t>(20, base.block_horizon()))));
          return;
        }
        if (cfg.op == "pietsch-d") {
          emit(leading(tl::pietsch_D(base), cfg.length));
          return;
        }
        auto x = leading(base, cfg.length);
        if (cfg.op == "shift-right") emit(tl::shift_right(x));
        else if (cfg.op == "shift-left") emit(tl::shift_left(x));
        else if (cfg.op == "dilate2") emit(tl::dilate2(x));
        else if (cfg.op == "cesaro") emit(tl::cesaro(x));
        else if (cfg.op == "cesaro-iter") emit(tl::cesaro_iter(x, cfg.m));
        else throw tl::precondition_error("unknown transform '" + cfg.op + "'");
      },
      src.base);
  return out;
}

tl::RadialSymbol load_symbol(const RunConfig& cfg) {
  if (cfg.symbol == "q-example") return tl::q_example(cfg.dim);
  if (cfg.symbol == "inverse-power") return tl::inverse_power(cfg.dim, cfg.power);
  if (cfg.symbol == "zero") return tl::zero_symbol(cfg.dim);
  if (cfg.symbol == "csv") {
    if (cfg.profile.empty()) throw tl::precondition_error("--symbol csv needs --profile <path>");
    return tl::read_profile_csv(cfg.dim, cfg.profile);
  }
  throw tl::precondition_error("unknown symbol '" + cfg.symbol + "'");
}

Output cmd_residue(const RunConfig& cfg) {
  tl::ResidueOptions opt;
  opt.n_blocks = cfg.residue_blocks;
  opt.anchors = cfg.anchors;
  opt.tolerance = cfg.tol;
  opt.normalization = cfg.normalization;
  auto rep = tl::residue_report(load_symbol(cfg), opt);
  Output out;
  if (undecided(cfg.critical, "res", rep.res_scalar.status == tl::ConvergenceStatus::undecided))
    out.code = kExitUndecidedCritical;
  if (undecided(cfg.critical, "pt", rep.lorentz.verdict.status == tl::ConvergenceStatus::undecided))
    out.code = kExitUndecidedCritical;
  switch (cfg.format) {
    case Format::json: out.text = tl::to_json(rep).dump(2) + "\n"; break;
    case Format::csv: out.text = pairs_text(rep.blocks.values, true); break;
    case Format::plot_data: out.text = pairs_text(rep.blocks.values, false); break;
  }
  return out;
}

Output cmd_verify(const RunConfig& cfg) {
  tl::VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.only = cfg.only;
  auto rep = tl::run_acceptance(opt);
  Output out;
  if (rep.results.empty()) throw tl::precondition_error("--only selected no criteria");
  out.code = rep.all_pass() ? kExitOk : kExitError;
  for (const auto& r : rep.results)
    if (!r.within_time())
      std::fprintf(stderr, "criterion %d exceeded its runtime limit (%.1f s > %.1f s)\n", r.id, r.seconds,
                   r.runtime_limit);
  if (cfg.format == Format::json) out.text = tl::to_json(rep).dump(2) + "\n";
  else out.text = tl::format_report(rep);
  return out;
}

void add_input_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--example", cfg.example, "Built-in example")
      ->check(CLI::IsMember({"harmonic", "y-dif1", "y-dif2", "x-alt-dyadic", "a-n"}));
  sub->add_option("--an-n", cfg.an_n, "Parameter n of the a-n example")->check(CLI::PositiveNumber);
  sub->add_option("--input", cfg.input, "CSV sequence (one value or re,im per line)");
  sub->add_option("--blocks", cfg.blocks, "Number of dyadic blocks")->check(CLI::PositiveNumber);
  sub->add_option("--k-max", cfg.k_max, "Largest Sucheston window")->check(CLI::PositiveNumber);
  sub->add_option("--m-max", cfg.m_max, "Largest Cesaro iterate")->check(CLI::Range(1, tl::kMaxCesaroIterates));
  sub->add_option("--critical", cfg.critical, "Verdicts whose undecided state gives exit code 2")
      ->delimiter(',')
      ->check(CLI::IsMember({"pt", "dixmier", "connes-dixmier", "dm", "res"}));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Numerical toolkit for traces on weak-l1, Banach limits and residues"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "plot-data"}));
  app.add_option("--tol", cfg.tol, "Verdict tolerance")->check([](const std::string& s) {
    double v = std::stod(s);
    return v > 0.0 && v < 1.0 ? std::string() : std::string("tolerance must lie in (0, 1)");
  });
  app.add_option("--seed", cfg.seed, "Seed for randomized checks");
  app.add_option("--out", cfg.out, "Write output to this file");

  auto* classify = app.add_subcommand("classify", "Measurability verdicts for an operator");
  add_input_options(classify, cfg);

  auto* bounds = app.add_subcommand("bounds", "Banach-limit interval of Phi (or of the raw sequence)");
  add_input_options(bounds, cfg);
  bounds->add_flag("--raw", cfg.raw, "Use the sequence itself instead of Phi; --blocks is then its length");

  auto* transform = app.add_subcommand("transform", "Apply a sequence transform");
  add_input_options(transform, cfg);
  transform->add_option("--op", cfg.op, "Transform")
      ->required()
      ->check(CLI::IsMember({"shift-right", "shift-left", "dilate2", "pietsch-d", "phi", "cesaro", "cesaro-iter"}));
  transform->add_option("--length", cfg.length, "Number of leading terms")->check(CLI::PositiveNumber);
  transform->add_option("--m", cfg.m, "Iterate count for cesaro-iter")->check(CLI::Range(0, tl::kMaxCesaroIterates));

  auto* residue = app.add_subcommand("residue", "Residue report for a radial symbol");
  residue->add_option("--symbol", cfg.symbol, "Symbol")
      ->check(CLI::IsMember({"q-example", "inverse-power", "zero", "csv"}));
  residue->add_option("--dim", cfg.dim, "Dimension d")->check(CLI::Range(1, 64));
  residue->add_option("--anchors", cfg.anchors, "Anchor indices n for the sparse windows")
      ->delimiter(',')
      ->check(CLI::Range(2, 5));
  residue->add_option("--n-blocks", cfg.residue_blocks, "Number of block integrals")->check(CLI::PositiveNumber);
  residue->add_option("--power", cfg.power, "Exponent p of inverse-power (q = r^-p)");
  residue->add_option("--normalization", cfg.normalization, "Trace normalization constant");
  residue->add_option("--profile", cfg.profile, "CSV of r,q rows for --symbol csv");
  residue->add_option("--critical", cfg.critical, "Verdicts whose undecided state gives exit code 2")
      ->delimiter(',')
      ->check(CLI::IsMember({"res", "pt"}));

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--only", cfg.only, "Criterion numbers, names or tags")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }
  cfg.format = format == "csv" ? Format::csv : format == "plot-data" ? Format::plot_data : Format::json;

  try {
    Output out;
    if (*classify) out = cmd_classify(cfg);
    else if (*bounds) out = cmd_bounds(cfg);
    else if (*transform) out = cmd_transform(cfg);
    else if (*residue) out = cmd_residue(cfg);
    else out = cmd_verify(cfg);

    if (cfg.out.empty()) {
      std::cout << out.text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw tl::error("cannot write '" + cfg.out + "'");
      f << out.text;
    }
    return out.code;
  } catch (const std::exception& e) {
    std::cerr << "tracelab: " << e.what() << "\n";
    return kExitError;
  }
}
