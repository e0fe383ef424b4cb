#include "roe/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "roe/coarse.hpp"
#include "roe/errors.hpp"
#include "roe/format.hpp"
#include "roe/io.hpp"
#include "roe/mv.hpp"
#include "roe/paths.hpp"
#include "roe/random.hpp"

namespace roe {

namespace {

constexpr const char* kSchema = "roe-report/1";

struct Row {
  std::string quantity;
  std::string value;
  std::string bound = "-";
  std::string margin = "-";
};

struct Report {
  std::string command;
  bool pass = true;
  std::string reason;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<Row> table;

  void field(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }
  void field(std::string key, double v) { field(std::move(key), format_real(v)); }
  void row(std::string q, double v) { table.push_back({std::move(q), format_real(v)}); }
  // Upper bound: margin = bound - value.
  void row(std::string q, double v, double bound) {
    table.push_back({std::move(q), format_real(v), format_real(bound), format_real(bound - v)});
  }
  void fail(std::string why) {
    if (pass) reason = std::move(why);
    pass = false;
  }

  std::string text() const {
    std::ostringstream os;
    os << "schema: " << kSchema << '\n';
    os << "command: " << command << '\n';
    os << "status: " << (pass ? "pass" : "fail") << '\n';
    for (const auto& [k, v] : fields) os << k << ": " << v << '\n';
    if (!pass) os << "FAIL: " << reason << '\n';
    os << "table: quantity\tvalue\tbound\tmargin\n";
    for (const Row& r : table) os << r.quantity << '\t' << r.value << '\t' << r.bound << '\t' << r.margin << '\n';
    return os.str();
  }
};

// Raw knob text; parsed locale-independently on use.
struct Knobs {
  std::map<std::string, std::string> values;
  std::string out;

  bool has(const std::string& k) const { return values.count(k) && !values.at(k).empty(); }
  double real(const std::string& k) const {
    if (!has(k)) throw Error(Errc::malformed_input, "missing --" + k);
    return parse_real(values.at(k));
  }
  double real(const std::string& k, double fallback) const { return has(k) ? real(k) : fallback; }
  long long integer(const std::string& k, long long fallback) const {
    return has(k) ? parse_integer(values.at(k)) : fallback;
  }
  std::uint64_t seed() const {
    const long long v = integer("seed", 0);
    if (v < 0) throw Error(Errc::malformed_input, "seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  std::string text(const std::string& k, const std::string& fallback) const { return has(k) ? values.at(k) : fallback; }
  QuasiParams params() const {
    QuasiParams q{real("epsilon"), real("r")};
    q.validate();
    return q;
  }
  double tau() const { return real("tau", kDefaultTau); }
  Parity parity() const {
    const std::string p = text("parity", "even");
    if (p == "even") return Parity::even;
    if (p == "odd") return Parity::odd;
    throw Error(Errc::malformed_input, "parity must be even or odd");
  }
};

const std::vector<std::string> kKnobNames = {"epsilon", "r",     "delta", "mesh",  "tau",   "seed",
                                             "trials",  "steps", "fiber", "parity", "power", "noise"};

SpacePtr load_space(const std::string& path) { return share(parse_space(read_file(path))); }

std::string join(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

class Runner {
 public:
  Runner(const Knobs& k, const std::vector<std::string>& in, std::map<std::string, std::string>& files)
      : k_(k), in_(in), files_(files) {}

  void need(std::size_t n, const char* usage) const {
    if (in_.size() != n) throw Error(Errc::malformed_input, std::string("usage: ") + usage);
  }

  void complex_validate(Report& rep) {
    need(1, "complex-validate COMPLEX");
    const SimplicialComplex x = parse_complex(read_file(in_[0]));
    rep.field("vertices", std::to_string(x.vertices().size()));
    rep.field("simplices", std::to_string(x.simplices().size()));
    rep.field("maximal", std::to_string(x.maximal().size()));
    rep.field("dimension", std::to_string(x.dimension()));
    for (int d = 0; d <= x.dimension(); ++d) rep.row("simplices_dim_" + std::to_string(d), x.simplices_of_dimension(d).size());
  }

  void discretize_cmd(Report& rep) {
    need(1, "discretize COMPLEX --mesh M [--fiber F]");
    const SimplicialComplex x = parse_complex(read_file(in_[0]));
    const double mesh = k_.real("mesh");
    const auto fiber = static_cast<int>(k_.integer("fiber", 1));
    const SampledSpace s = discretize(x, mesh, fiber);
    files_["space.tsv"] = write_space(s);
    rep.field("mesh", mesh);
    rep.field("refinement", std::to_string(lattice_refinement(x.dimension(), mesh)));
    rep.field("points", std::to_string(s.size()));
    rep.field("total_dim", std::to_string(s.total_dim()));
    rep.row("triangle_defect", s.triangle_defect(), 1e-12);
  }

  void op_prop(Report& rep) {
    need(2, "op-prop SPACE OPERATOR [--r R] [--tau T]");
    const SpacePtr s = load_space(in_[0]);
    const FiniteOperator t = parse_operator(read_file(in_[1]), s);
    const ExtReal prop = propagation(t, k_.tau());
    rep.field("amplification", std::to_string(t.amplification()));
    rep.field("support_pairs", std::to_string(support(t, k_.tau()).pairs.size()));
    rep.field("norm", opnorm(t));
    if (k_.has("r")) {
      const double r = k_.real("r");
      rep.row("propagation", prop.value(), r);
      if (!(prop < r)) rep.fail("propagation " + prop.to_string() + " is not below r");
    } else {
      rep.row("propagation", prop.value());
    }
  }

  void quasi_check(Report& rep) {
    need(2, "quasi-check SPACE OPERATOR --epsilon E --r R [--parity even|odd]");
    const SpacePtr s = load_space(in_[0]);
    const FiniteOperator t = parse_operator(read_file(in_[1]), s);
    const QuasiParams q = k_.params();
    const Parity par = k_.parity();
    const QuasiWitness w = is_quasi(par, t, q, k_.tau());
    rep.field("parity", to_string(par));
    if (par == Parity::even) {
      rep.row("hermitian_defect", w.hermitian_defect, kHermitianTolerance);
      rep.row("defect", w.defect, q.epsilon);
    } else {
      rep.row("left_defect", w.left_defect, q.epsilon);
      rep.row("right_defect", w.right_defect, q.epsilon);
    }
    rep.row("propagation", w.propagation.value(), q.r);
    if (!w.ok) rep.fail(std::string("not an (epsilon, r)-quasi-") + (par == Parity::even ? "projection" : "unitary"));
  }

  void k0_points_cmd(Report& rep) {
    need(2, "k0-points SPACE OPERATOR --epsilon E --r R");
    const SpacePtr s = load_space(in_[0]);
    const FiniteOperator t = parse_operator(read_file(in_[1]), s);
    const std::vector<long> ranks = k0_points(t, k_.params(), k_.tau());
    rep.field("points", std::to_string(ranks.size()));
    rep.field("ranks", join(ranks));
    long total = 0;
    for (long v : ranks) total += v;
    rep.row("total_rank", static_cast<double>(total));
  }

  void add_certificate_rows(Report& rep, const HomotopyCertificate& c) {
    const CertificateReport v = verify_certificate(c, k_.tau());
    rep.field("samples", std::to_string(c.samples.size()));
    rep.field("ambient_epsilon", c.params.epsilon);
    rep.field("ambient_r", c.params.r);
    rep.row("worst_defect", v.worst_defect, c.params.epsilon);
    rep.row("worst_propagation", v.worst_propagation.value(), c.params.r);
    if (!c.step_bounds.empty()) rep.row("worst_step_margin", v.worst_step_margin);
    if (!v.ok) rep.fail("certificate does not verify: " + v.reason);
  }

  void certify_homotopy(Report& rep) {
    need(3, "certify-homotopy SPACE OPERATOR_A OPERATOR_B --epsilon E --r R [--parity even|odd]");
    const SpacePtr s = load_space(in_[0]);
    const FiniteOperator a = parse_operator(read_file(in_[1]), s);
    const FiniteOperator b = parse_operator(read_file(in_[2]), s);
    const QuasiParams q = k_.params();
    rep.field("parity", to_string(k_.parity()));
    rep.field("distance", distance(a, b));
    const HomotopyCertificate c = interpolation_certificate(a, b, q, k_.parity(), k_.tau());
    files_["homotopy.cert"] = write_certificate(c);
    add_certificate_rows(rep, c);
  }

  void coarse_ad(Report& rep) {
    need(4, "coarse-ad SOURCE_SPACE TARGET_SPACE MAP OPERATOR --delta D");
    const SpacePtr src = load_space(in_[0]);
    const SpacePtr tgt = load_space(in_[1]);
    const CoarseMap f = parse_coarse_map(read_file(in_[2]), src, tgt);
    const FiniteOperator t = parse_operator(read_file(in_[3]), src);
    const double delta = k_.real("delta");
    const CoverIsometry v = delta_cover(f, delta);
    const FiniteOperator a = ad(v, t);
    files_["ad.op"] = write_operator(a);
    const ExtReal pt = propagation(t, k_.tau());
    const ExtReal omega = expansion_function(f, std::nextafter(pt.value(), INFINITY));
    rep.field("delta", delta);
    rep.field("source_propagation", pt.to_string());
    rep.field("omega", omega.to_string());
    rep.row("isometry_defect", v.isometry_defect(), 1e-12);
    rep.row("support_excess", v.support_excess(), 0.0);
    const ExtReal pa = propagation(a, k_.tau());
    rep.row("propagation", pa.value(), (omega + ExtReal(2.0 * delta)).value());
    if (!(pa <= (omega + ExtReal(2.0 * delta)).value())) rep.fail("propagation exceeds omega + 2 delta");
  }

  void rotation_cmd(Report& rep) {
    need(4, "rotation-homotopy SOURCE_SPACE TARGET_SPACE MAP OPERATOR --epsilon E --r R --delta D [--steps N]");
    const SpacePtr src = load_space(in_[0]);
    const SpacePtr tgt = load_space(in_[1]);
    const CoarseMap f = parse_coarse_map(read_file(in_[2]), src, tgt);
    const FiniteOperator p = parse_operator(read_file(in_[3]), src);
    // Second cover: same map, fibers filled in reverse point order.
    std::vector<std::size_t> reverse(src->size());
    for (std::size_t i = 0; i < reverse.size(); ++i) reverse[i] = reverse.size() - 1 - i;
    const double delta = k_.real("delta");
    std::optional<int> steps;
    if (k_.has("steps")) steps = static_cast<int>(k_.integer("steps", 0));
    const RotationHomotopy h =
        rotation_homotopy(delta_cover(f, delta), delta_cover(f, delta, reverse), p, k_.params(), steps, k_.tau());
    files_["rotation.cert"] = write_certificate(h.certificate);
    rep.field("steps", std::to_string(h.steps));
    rep.field("omega", h.omega);
    rep.field("delta", h.delta);
    add_certificate_rows(rep, h.certificate);
  }

  void mv_verify(Report& rep) {
    need(1, "mv-verify COMPLEX --mesh M [--r R] [--trials N] [--seed S] [--fiber F]");
    const SimplicialComplex x = parse_complex(read_file(in_[0]));
    const SpacePtr s = share(discretize(x, k_.real("mesh"), static_cast<int>(k_.integer("fiber", 1))));
    const double r = k_.real("r", kMaxMvDegree);
    const long long trials = k_.integer("trials", 40);
    if (trials < 1) throw Error(Errc::domain, "trials must be >= 1");
    const MvPair p = mv_pair(*s, x, r);
    const MvReport m = verify_weak_mv_pair(s, p, static_cast<std::size_t>(trials), k_.seed(), k_.tau());
    rep.field("points", std::to_string(s->size()));
    rep.field("r", r);
    rep.field("trials", std::to_string(trials));
    rep.field("seed", std::to_string(k_.seed()));
    rep.field("coercity", std::max({m.split_coercity, m.cia_coercity, m.adversarial_coercity}));
    rep.field("containment", m.containment_ok ? "ok" : "violated");
    for (const MvScaleRow& row : m.rows) {
      const std::string at = "@s=" + format_real(row.s);
      rep.row("split_coercity" + at, row.split_coercity, p.coercity);
      rep.row("cia_coercity" + at, row.cia_coercity, p.coercity);
    }
    rep.row("adversarial_coercity", m.adversarial_coercity, p.coercity);
    rep.row("reconstruction", m.worst_reconstruction, 1e-14);
    if (!m.ok) rep.fail(m.reason);
  }

  void clutching_index(Report& rep) {
    need(1, "clutching-index COMPLEX [--mesh M] [--power K] [--noise N] [--seed S]");
    const SimplicialComplex x = parse_complex(read_file(in_[0]));
    const SpacePtr s = share(discretize(x, k_.real("mesh", 0.25), 1));
    const std::vector<std::size_t> order = cyclic_order(*s, x);
    const auto power = static_cast<int>(k_.integer("power", 1));
    const double noise = k_.real("noise", 0.0);
    FiniteOperator u = cyclic_shift(s, order, power);
    double step = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      step = std::max(step, s->dist(order[j], order[(j + 1) % order.size()]).value());
    }
    if (noise > 0.0) {
      Rng rng(derive_seed(k_.seed(), 0));
      u = u + random_perturbation(s, 1, noise, 1.5 * step, rng);
    }
    const CutFunction phi = CutFunction::upper_arc(order);
    const auto regions = cut_regions(*s, phi, 1.5 * step);
    rep.field("points", std::to_string(s->size()));
    rep.field("power", std::to_string(power));
    rep.field("noise", noise);
    rep.field("regions", std::to_string(regions.size()));
    std::vector<long> idx;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const LocalIndex li = local_index(u, phi, regions[i]);
      idx.push_back(li.index);
      rep.row("trace_region_" + std::to_string(i), li.trace);
      rep.row("integrality_region_" + std::to_string(i), std::abs(li.trace - static_cast<double>(li.index)), 0.1);
    }
    rep.field("index", idx.empty() ? std::string("-") : std::to_string(idx[0]));
    rep.field("indices", join(idx));
  }

  void path_trim(Report& rep) {
    need(2, "path-trim SPACE PATH --r R");
    const SpacePtr s = load_space(in_[0]);
    const PathOperator p = parse_path(read_file(in_[1]), s);
    const double r = k_.real("r");
    const double n = eventual_propagation(p, r, k_.tau());
    const PathOperator t = trim(p, n);
    files_["trimmed.path"] = write_path(t);
    rep.field("horizon", p.horizon());
    rep.field("samples", std::to_string(p.size()));
    rep.field("modulus", p.modulus());
    rep.field("trim_time", n);
    rep.field("trimmed_samples", std::to_string(t.size()));
    ExtReal worst;
    for (const auto& v : t.values()) worst = max(worst, propagation(v, k_.tau()));
    rep.row("tail_propagation", worst.value(), r);
  }

 private:
  const Knobs& k_;
  const std::vector<std::string>& in_;
  std::map<std::string, std::string>& files_;
};

// Splits a report into (header fields, FAIL line, table rows).
struct ParsedReport {
  std::string command;
  std::string status;
  std::vector<std::string> body;
  std::vector<std::string> rows;
};

ParsedReport parse_report(const std::string& name, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  ParsedReport r;
  if (!std::getline(is, line) || line != std::string("schema: ") + kSchema) {
    throw Error(Errc::malformed_input, name + ": not a " + kSchema + " report");
  }
  bool table = false;
  while (std::getline(is, line)) {
    if (line.rfind("table:", 0) == 0) {
      table = true;
    } else if (table) {
      r.rows.push_back(line);
    } else if (line.rfind("command: ", 0) == 0) {
      r.command = line.substr(9);
    } else if (line.rfind("status: ", 0) == 0) {
      r.status = line.substr(8);
    } else {
      r.body.push_back(line);
    }
  }
  if (r.command.empty() || r.status.empty()) throw Error(Errc::malformed_input, name + ": report lacks command or status");
  return r;
}

std::string merge_reports(const std::vector<std::string>& inputs, bool& all_pass) {
  if (inputs.empty()) throw Error(Errc::malformed_input, "usage: report FILE...");
  std::vector<ParsedReport> parts;
  for (const auto& f : inputs) parts.push_back(parse_report(f, read_file(f)));
  all_pass = std::all_of(parts.begin(), parts.end(), [](const ParsedReport& p) { return p.status == "pass"; });
  std::ostringstream os;
  os << "schema: " << kSchema << '\n';
  os << "command: report\n";
  os << "status: " << (all_pass ? "pass" : "fail") << '\n';
  os << "sections: " << parts.size() << '\n';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    os << "section " << i + 1 << ": " << parts[i].command << " " << std::filesystem::path(inputs[i]).filename().string()
       << " " << parts[i].status << '\n';
    for (const auto& b : parts[i].body) os << "  " << b << '\n';
  }
  os << "table: quantity\tvalue\tbound\tmargin\n";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (const auto& r : parts[i].rows) os << i + 1 << '.' << parts[i].command << '.' << r << '\n';
  }
  return os.str();
}

int exit_for(Errc c) {
  switch (c) {
    case Errc::malformed_input:
    case Errc::unknown_simplex:
      return kExitParseError;
    case Errc::no_certificate:
    case Errc::refine_needed:
    case Errc::construction:
    case Errc::detector_inconclusive:
    case Errc::no_decay:
    case Errc::spectral_gap_violation:
      return kExitVerificationFailed;
    default:
      return kExitPrecondition;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controlled K-theory toolkit for discretized simplicial complexes", "roe"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key = value file; flags win");
  Knobs knobs;
  for (const auto& k : kKnobNames) app.add_option("--" + k, knobs.values[k]);
  app.add_option("--out", knobs.out, "Output directory");

  std::vector<std::string> inputs;
  const char* names[] = {"complex-validate", "discretize",       "op-prop",   "quasi-check",
                         "k0-points",        "certify-homotopy", "coarse-ad", "rotation-homotopy",
                         "mv-verify",        "clutching-index",  "path-trim", "report"};
  for (const char* n : names) {
    CLI::App* sub = app.add_subcommand(n);
    sub->fallthrough();
    sub->add_option("inputs", inputs);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "FAIL: " << e.what() << '\n';
    return kExitParseError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::map<std::string, std::string> files;
  Report rep;
  rep.command = command;
  std::string text;
  try {
    if (command == "report") {
      bool all_pass = true;
      text = merge_reports(inputs, all_pass);
    } else {
      Runner run(knobs, inputs, files);
      if (command == "complex-validate") run.complex_validate(rep);
      else if (command == "discretize") run.discretize_cmd(rep);
      else if (command == "op-prop") run.op_prop(rep);
      else if (command == "quasi-check") run.quasi_check(rep);
      else if (command == "k0-points") run.k0_points_cmd(rep);
      else if (command == "certify-homotopy") run.certify_homotopy(rep);
      else if (command == "coarse-ad") run.coarse_ad(rep);
      else if (command == "rotation-homotopy") run.rotation_cmd(rep);
      else if (command == "mv-verify") run.mv_verify(rep);
      else if (command == "clutching-index") run.clutching_index(rep);
      else if (command == "path-trim") run.path_trim(rep);
      text = rep.text();
    }
  } catch (const Error& e) {
    const int code = exit_for(e.code());
    if (code == kExitVerificationFailed) {
      rep.fail(e.what());
      text = rep.text();
      out << text;
      if (!knobs.out.empty()) {
        try {
          std::filesystem::create_directories(knobs.out);
          write_file_atomic(std::filesystem::path(knobs.out) / (command + ".report"), text);
        } catch (const std::exception&) {
        }
      }
    }
    err << "FAIL: " << e.what() << '\n';
    return code;
  }

  out << text;
  try {
    if (!knobs.out.empty()) {
      const std::filesystem::path dir(knobs.out);
      std::filesystem::create_directories(dir);
      for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
      write_file_atomic(dir / (command + ".report"), text);
      write_file_atomic(dir / (command + ".tsv"), text.substr(text.find("table: ") + 7));
    }
  } catch (const std::exception& e) {
    err << "FAIL: " << e.what() << '\n';
    return kExitPrecondition;
  }
  if (!rep.pass) {
    err << "FAIL: " << rep.reason << '\n';
    return kExitVerificationFailed;
  }
  return kExitOk;
}

}  // namespace roe
