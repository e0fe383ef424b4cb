#include "roe/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "roe/errors.hpp"
#include "roe/format.hpp"

namespace roe {

namespace {

constexpr int kDigits = 17;

std::string real17(double v) { return format_real(v, kDigits); }

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string_view> split(std::string_view line, std::string_view seps = " \t") {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto a = line.find_first_not_of(seps, i);
    if (a == std::string_view::npos) break;
    auto b = line.find_first_of(seps, a);
    if (b == std::string_view::npos) b = line.size();
    out.push_back(line.substr(a, b - a));
    i = b;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::malformed_input, "line " + std::to_string(current_) + ": " + what);
  }

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  std::string_view line() {
    skip();
    current_ = line_no_;
    if (pos_ >= text_.size()) fail("unexpected end of input");
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = trim(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    ++line_no_;
    return l;
  }

  std::vector<std::string_view> tokens() { return split(line()); }

  // "key rest..." with the key checked.
  std::vector<std::string_view> keyed(std::string_view key) {
    auto t = tokens();
    if (t.empty() || t[0] != key) fail("expected '" + std::string(key) + "'");
    t.erase(t.begin());
    return t;
  }

  std::string_view value(std::string_view key) {
    auto t = keyed(key);
    if (t.size() != 1) fail("expected one value after '" + std::string(key) + "'");
    return t[0];
  }

  double real(std::string_view key) { return number(value(key)); }
  long long integer(std::string_view key) { return as_integer(value(key)); }
  long long as_integer(std::string_view tok) {
    try {
      return parse_integer(tok);
    } catch (const Error&) {
      fail("not an integer: '" + std::string(tok) + "'");
    }
  }
  std::size_t count(std::string_view key) {
    const long long v = integer(key);
    if (v < 0) fail("negative count for '" + std::string(key) + "'");
    return static_cast<std::size_t>(v);
  }

  double number(std::string_view tok) {
    try {
      return parse_real(tok);
    } catch (const Error&) {
      fail("not a number: '" + std::string(tok) + "'");
    }
  }

  void header(std::string_view magic) {
    const auto t = tokens();
    if (t.size() != 2 || t[0] != magic || t[1] != "1") fail("expected header '" + std::string(magic) + " 1'");
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      const std::string_view l = trim(text_.substr(pos_, end - pos_));
      if (!l.empty() && l.front() != '#') return;
      pos_ = end + 1;
      ++line_no_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 1;
  std::size_t current_ = 0;
};

void check_hash(Reader& r, const SampledSpace& s, std::string_view key) {
  const auto h = r.value(key);
  if (h != hex(s.hash())) {
    throw Error(Errc::shape_mismatch, std::string(key) + " hash " + std::string(h) + " does not match " + hex(s.hash()));
  }
}

void put_matrix(std::ostringstream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << real17(m(i, j).real()) << ' ' << real17(m(i, j).imag());
    }
    os << '\n';
  }
}

Matrix get_matrix(Reader& r, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto t = r.tokens();
    if (static_cast<Eigen::Index>(t.size()) != 2 * cols) r.fail("expected " + std::to_string(2 * cols) + " numbers");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(r.number(t[2 * j]), r.number(t[2 * j + 1]));
  }
  return m;
}

void put_operator(std::ostringstream& os, const FiniteOperator& t) {
  os << "roe-operator 1\n";
  os << "space " << hex(t.space().hash()) << '\n';
  os << "amplification " << t.amplification() << '\n';
  os << "dim " << t.dim() << '\n';
  if (t.scalar_part()) {
    os << "scalar\n";
    put_matrix(os, *t.scalar_part());
  } else {
    os << "scalar none\n";
  }
  os << "entries\n";
  put_matrix(os, t.entries());
}

FiniteOperator get_operator(Reader& r, const SpacePtr& space) {
  r.header("roe-operator");
  check_hash(r, *space, "space");
  const long long k = r.integer("amplification");
  if (k < 1) r.fail("amplification must be >= 1");
  const auto n = static_cast<Eigen::Index>(r.count("dim"));
  if (n != k * static_cast<Eigen::Index>(space->total_dim())) r.fail("dim does not match amplification and space");
  const auto sc = r.keyed("scalar");
  std::optional<Matrix> scalar;
  if (sc.empty()) {
    scalar = get_matrix(r, k, k);
  } else if (sc.size() != 1 || sc[0] != "none") {
    r.fail("expected 'scalar' or 'scalar none'");
  }
  r.keyed("entries");
  Matrix e = get_matrix(r, n, n);
  return FiniteOperator(space, static_cast<int>(k), std::move(e), std::move(scalar));
}

Parity get_parity(Reader& r) {
  const auto v = r.value("parity");
  if (v == "even") return Parity::even;
  if (v == "odd") return Parity::odd;
  r.fail("parity must be even or odd");
}

std::vector<double> get_reals(Reader& r, std::string_view key, std::size_t n) {
  const auto t = r.keyed(key);
  if (t.size() != n) r.fail("expected " + std::to_string(n) + " values after '" + std::string(key) + "'");
  std::vector<double> v;
  for (auto s : t) v.push_back(r.number(s));
  return v;
}

void put_reals(std::ostringstream& os, std::string_view key, const std::vector<double>& v) {
  os << key;
  for (double x : v) os << ' ' << real17(x);
  os << '\n';
}

void put_coarse_map(std::ostringstream& os, const CoarseMap& f) {
  os << "roe-coarse-map 1\n";
  os << "source " << hex(f.source().hash()) << '\n';
  os << "target " << hex(f.target().hash()) << '\n';
  os << "points " << f.assignment().size() << '\n';
  for (std::size_t i = 0; i < f.assignment().size(); ++i) os << i << ' ' << f.assignment()[i] << '\n';
}

CoarseMap get_coarse_map(Reader& r, const SpacePtr& source, const SpacePtr& target) {
  r.header("roe-coarse-map");
  check_hash(r, *source, "source");
  check_hash(r, *target, "target");
  const std::size_t n = r.count("points");
  if (n != source->size()) r.fail("point count does not match the source space");
  std::vector<std::size_t> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = r.tokens();
    if (t.size() != 2) r.fail("expected 'point target'");
    const long long p = r.as_integer(t[0]), q = r.as_integer(t[1]);
    if (p != static_cast<long long>(i) || q < 0) r.fail("assignment rows must be listed in order");
    a[i] = static_cast<std::size_t>(q);
  }
  return CoarseMap(source, target, std::move(a));
}

}  // namespace

SimplicialComplex parse_complex(std::string_view text) {
  Reader r(text);
  std::vector<std::vector<int>> maximal;
  while (!r.at_end()) {
    std::vector<int> s;
    for (auto tok : r.tokens()) {
      const long long v = r.as_integer(tok);
      if (v < 0 || v > std::numeric_limits<int>::max()) r.fail("vertex id out of range");
      s.push_back(static_cast<int>(v));
    }
    maximal.push_back(std::move(s));
  }
  if (maximal.empty()) throw Error(Errc::malformed_input, "complex file has no simplices");
  return build_complex(maximal);
}

std::string write_complex(const SimplicialComplex& x) {
  std::ostringstream os;
  for (std::size_t idx : x.maximal()) {
    const Simplex& s = x.simplices()[idx];
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
    os << '\n';
  }
  return os.str();
}

std::string write_space(const SampledSpace& s) {
  std::ostringstream os;
  os << "roe-space 1\n";
  os << "hash " << hex(s.hash()) << '\n';
  os << "mesh " << real17(s.mesh()) << '\n';
  os << "points " << s.size() << '\n';
  os << "# id\tcarrier\tfiber\tweights\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const SamplePoint& p = s.point(i);
    os << i << '\t' << (p.carrier == npos ? std::string("-") : std::to_string(p.carrier)) << '\t'
       << s.internal_dim(i) << '\t';
    if (p.weights.empty()) os << '-';
    for (std::size_t j = 0; j < p.weights.size(); ++j) os << (j ? "," : "") << real17(p.weights[j]);
    os << '\n';
  }
  os << "dist\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) os << (j ? "\t" : "") << real17(s.distances()(i, j));
    os << '\n';
  }
  return os.str();
}

SampledSpace parse_space(std::string_view text) {
  Reader r(text);
  r.header("roe-space");
  const std::string hash(r.value("hash"));
  const double mesh = r.real("mesh");
  const std::size_t n = r.count("points");
  std::vector<SamplePoint> pts(n);
  std::vector<int> dims(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = r.tokens();
    if (t.size() != 4) r.fail("expected id, carrier, fiber, weights");
    if (r.as_integer(t[0]) != static_cast<long long>(i)) r.fail("point rows must be listed in order");
    if (t[1] != "-") {
      const long long c = r.as_integer(t[1]);
      if (c < 0) r.fail("negative carrier");
      pts[i].carrier = static_cast<std::size_t>(c);
    }
    dims[i] = static_cast<int>(r.as_integer(t[2]));
    if (t[3] != "-") {
      for (auto w : split(t[3], ",")) pts[i].weights.push_back(r.number(w));
    }
  }
  r.keyed("dist");
  Eigen::MatrixXd d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = r.tokens();
    if (t.size() != n) r.fail("distance row needs " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) d(i, j) = r.number(t[j]);
  }
  SampledSpace s(std::move(pts), std::move(d), std::move(dims), mesh);
  if (hex(s.hash()) != hash) throw Error(Errc::malformed_input, "space hash does not match its contents");
  return s;
}

std::string write_operator(const FiniteOperator& t) {
  std::ostringstream os;
  put_operator(os, t);
  return os.str();
}

FiniteOperator parse_operator(std::string_view text, const SpacePtr& space) {
  Reader r(text);
  FiniteOperator t = get_operator(r, space);
  if (!r.at_end()) r.fail("trailing content");
  return t;
}

std::string write_certificate(const HomotopyCertificate& c) {
  std::ostringstream os;
  os << "roe-certificate 1\n";
  os << "parity " << to_string(c.parity) << '\n';
  os << "epsilon " << real17(c.params.epsilon) << '\n';
  os << "r " << real17(c.params.r) << '\n';
  os << "samples " << c.samples.size() << '\n';
  put_reals(os, "step_bounds", c.step_bounds);
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    os << "sample " << i << '\n';
    put_operator(os, c.samples[i]);
  }
  return os.str();
}

HomotopyCertificate parse_certificate(std::string_view text, const SpacePtr& space) {
  Reader r(text);
  r.header("roe-certificate");
  HomotopyCertificate c;
  c.parity = get_parity(r);
  c.params.epsilon = r.real("epsilon");
  c.params.r = r.real("r");
  const std::size_t n = r.count("samples");
  c.step_bounds = get_reals(r, "step_bounds", n == 0 ? 0 : n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.count("sample") != i) r.fail("samples must be listed in order");
    c.samples.push_back(get_operator(r, space));
  }
  if (!r.at_end()) r.fail("trailing content");
  return c;
}

std::string write_kclass(const KClassRep& x) {
  std::ostringstream os;
  os << "roe-kclass 1\n";
  os << "parity " << to_string(x.parity) << '\n';
  os << "ell " << x.ell << '\n';
  os << "epsilon " << real17(x.params.epsilon) << '\n';
  os << "r " << real17(x.params.r) << '\n';
  put_operator(os, x.rep);
  return os.str();
}

KClassRep parse_kclass(std::string_view text, const SpacePtr& space) {
  Reader r(text);
  r.header("roe-kclass");
  const Parity parity = get_parity(r);
  const std::size_t ell = r.count("ell");
  QuasiParams q;
  q.epsilon = r.real("epsilon");
  q.r = r.real("r");
  KClassRep x{parity, get_operator(r, space), ell, q};
  if (!r.at_end()) r.fail("trailing content");
  return x;
}

std::string write_path(const PathOperator& p) {
  std::ostringstream os;
  os << "roe-path 1\n";
  os << "samples " << p.size() << '\n';
  os << "horizon " << real17(p.horizon()) << '\n';
  os << "modulus " << real17(p.modulus()) << '\n';
  put_reals(os, "times", p.times());
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << "sample " << i << '\n';
    put_operator(os, p.values()[i]);
  }
  return os.str();
}

PathOperator parse_path(std::string_view text, const SpacePtr& space) {
  Reader r(text);
  r.header("roe-path");
  const std::size_t n = r.count("samples");
  if (n == 0) r.fail("path needs at least one sample");
  const double horizon = r.real("horizon");
  const double modulus = r.real("modulus");
  std::vector<double> times = get_reals(r, "times", n);
  if (times.back() != horizon) r.fail("horizon must equal the last time");
  std::vector<FiniteOperator> values;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.count("sample") != i) r.fail("samples must be listed in order");
    values.push_back(get_operator(r, space));
  }
  if (!r.at_end()) r.fail("trailing content");
  return PathOperator(std::move(times), std::move(values), modulus);
}

std::string write_coarse_map(const CoarseMap& f) {
  std::ostringstream os;
  put_coarse_map(os, f);
  return os.str();
}

CoarseMap parse_coarse_map(std::string_view text, const SpacePtr& source, const SpacePtr& target) {
  Reader r(text);
  CoarseMap f = get_coarse_map(r, source, target);
  if (!r.at_end()) r.fail("trailing content");
  return f;
}

std::string write_frames(const LipschitzHomotopy& h) {
  std::ostringstream os;
  os << "roe-frames 1\n";
  os << "c " << real17(h.lipschitz_bound()) << '\n';
  os << "frames " << h.frames().size() << '\n';
  std::vector<double> disp;
  for (const ExtReal& d : h.displacements()) disp.push_back(d.value());
  put_reals(os, "displacements", disp);
  for (std::size_t i = 0; i < h.frames().size(); ++i) {
    os << "frame " << i << '\n';
    put_coarse_map(os, h.frames()[i]);
  }
  return os.str();
}

LipschitzHomotopy parse_frames(std::string_view text, const SpacePtr& source, const SpacePtr& target) {
  Reader r(text);
  r.header("roe-frames");
  const double c = r.real("c");
  const std::size_t n = r.count("frames");
  if (n == 0) r.fail("need at least one frame");
  const std::vector<double> disp = get_reals(r, "displacements", n - 1);
  std::vector<CoarseMap> frames;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.count("frame") != i) r.fail("frames must be listed in order");
    frames.push_back(get_coarse_map(r, source, target));
  }
  if (!r.at_end()) r.fail("trailing content");
  LipschitzHomotopy h(std::move(frames), c);
  for (std::size_t i = 0; i < disp.size(); ++i) {
    if (h.displacements()[i].value() != disp[i]) {
      throw Error(Errc::malformed_input, "displacement table does not match the frames", i);
    }
  }
  return h;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::malformed_input, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& p, std::string_view content) {
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::domain, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::domain, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::domain, "cannot rename onto " + p.string());
  }
}

}  // namespace roe
