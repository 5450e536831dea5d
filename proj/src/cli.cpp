#include "uppertri/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "uppertri/factor.hpp"
#include "uppertri/infop.hpp"
#include "uppertri/io.hpp"
#include "uppertri/range.hpp"
#include "uppertri/rkhs.hpp"
#include "uppertri/toeplitz.hpp"

namespace uppertri::cli {

namespace {

using io::json;

// FNV-1a over argv and every input file read.
class Digest {
 public:
  void add(const std::string& bytes) {
    for (unsigned char ch : bytes) state_ = (state_ ^ ch) * 1099511628211ull;
    state_ = (state_ ^ 0xffu) * 1099511628211ull;
  }
  std::string hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return std::string("fnv1a64:") + buf;
  }

 private:
  std::uint64_t state_ = 1469598103934665603ull;
};

struct Session {
  Digest digest;
  json outputs = json::object();
  json residuals = json::object();

  json read_json(const std::string& path) {
    const std::string text = io::read_file(path);
    digest.add(text);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  DenseMatrix read_matrix(const std::string& path) { return io::matrix_from_json(read_json(path)); }
  BlockOperator read_operator(const std::string& path) { return io::operator_from_json(read_json(path)); }
  Symbol read_symbol(const std::string& path) { return io::symbol_from_json(read_json(path)); }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InputError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad number '" + s + "'");
  }
}

int parse_int(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v)) throw InputError("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const auto& t : split(text, ',')) out.push_back(parse_int(t));
  return out;
}

// "a" or "a:b" (real:imag), comma separated.
std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  for (const auto& t : split(text, ',')) {
    const auto parts = split(t, ':');
    if (parts.size() == 1) out.emplace_back(parse_double(parts[0]), 0.0);
    else if (parts.size() == 2) out.emplace_back(parse_double(parts[0]), parse_double(parts[1]));
    else throw InputError("bad complex entry '" + t + "'");
  }
  return out;
}

DenseVector to_vector(const std::vector<Complex>& v) {
  DenseVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

DenseVector vector_or_unit(const std::string& text, int c) {
  if (text.empty()) return DenseVector::Unit(c, 0);
  DenseVector v = to_vector(parse_complex_list(text));
  if (v.size() != c) throw InputError("vector must have " + std::to_string(c) + " entries");
  return v;
}

// Window whose (n+1)^d c scalar positions match `size`.
Window infer_window(Eigen::Index size, int d, int c) {
  if (d < 1 || c < 1) throw InputError("--d and --block must be positive");
  if (size <= 0 || size % c != 0) throw InputError("matrix size is not a multiple of the block size");
  const auto per = size / c;
  const auto side = static_cast<long long>(std::llround(std::pow(static_cast<double>(per), 1.0 / d)));
  long long prod = 1;
  for (int k = 0; k < d; ++k) prod *= side;
  if (prod != per) throw InputError("matrix size " + std::to_string(size) + " is not (n+1)^d * c for d = " + std::to_string(d));
  return Window(d, static_cast<int>(side) - 1);
}

json violations_json(const std::vector<PatternViolation>& v) {
  json out = json::array();
  for (const auto& e : v)
    out.push_back(json{{"position", json::array({e.row + 1, e.col + 1})},
                       {"I", io::index_to_json(e.row_index)},
                       {"K", io::index_to_json(e.col_index)},
                       {"magnitude", e.magnitude}});
  return out;
}

json indices_json(const std::vector<MultiIndex>& idx) {
  json out = json::array();
  for (const auto& i : idx) out.push_back(io::index_to_json(i));
  return out;
}

json complex_list_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (Complex z : v) out.push_back(io::complex_to_json(z));
  return out;
}

std::string csv_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<int>& n, const std::vector<double>& delta,
               const std::vector<double>& residual) {
  std::string text = "n,delta,residual\n";
  for (std::size_t i = 0; i < n.size(); ++i)
    text += std::to_string(n[i]) + "," + csv_number(delta[i]) + "," + csv_number(residual[i]) + "\n";
  io::write_file(path, text);
}

void flatten(const std::string& prefix, const json& j, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(), rows);
    return;
  }
  if (j.is_array() && !std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); })) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(prefix + "[" + std::to_string(i) + "]", j[i], rows);
    return;
  }
  rows.emplace_back(prefix, io::dump(j));
}

std::string pretty_text(const json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten("", report, rows);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct GenOpts {
  int d = 1, c = 1, n = 8, band = 2;
  std::string law = "band", out, factor_out;
};

int cmd_gen(Session& s, const GenOpts& o, std::uint64_t seed) {
  SupportLaw law = SupportLaw::banded(o.band);
  if (o.law == "diagonal") law = SupportLaw::diagonal();
  else if (o.law == "full") law = SupportLaw::full();
  else if (o.law != "band") throw InputError("--law must be band, diagonal or full");
  const UpperInstance inst = gen_upper(o.d, o.c, o.n, law, seed);

  json support = json::array();
  for (const auto& [k, v] : inst.support) support.push_back(json{{"K", io::index_to_json(k)}, {"s", v}});
  s.outputs["d"] = o.d;
  s.outputs["c"] = o.c;
  s.outputs["n"] = o.n;
  s.outputs["law"] = o.law;
  s.outputs["band"] = o.band;
  s.outputs["columns"] = inst.q.columns().size();
  s.outputs["support"] = std::move(support);
  const json op = io::operator_to_json(inst.q);
  if (o.out.empty()) s.outputs["operator"] = op;
  else io::write_file(o.out, io::dump(op, 1) + "\n");
  if (!o.factor_out.empty()) io::write_file(o.factor_out, io::dump(io::matrix_to_json(inst.u), 1) + "\n");
  return kOk;
}

struct FactorOpts {
  std::string input, op_file, method = "reverse", pattern = "nest-tensor", out;
  int d = 1, block = 1, n = -1, extra_cols = -1;
};

int cmd_factor(Session& s, const FactorOpts& o) {
  DenseMatrix q;
  int d = o.d, c = o.block;
  std::optional<Window> window;
  if (!o.op_file.empty()) {
    const BlockOperator op = s.read_operator(o.op_file);
    d = op.dim();
    c = op.block_size();
    window.emplace(d, o.n >= 0 ? o.n : op.max_coord());
    q = window_extract(op, *window);
  } else if (!o.input.empty()) {
    q = s.read_matrix(o.input);
    window.emplace(infer_window(q.rows(), d, c));
  } else {
    throw InputError("factor needs --input or --operator");
  }
  if (o.pattern != "nest-tensor") throw InputError("--pattern must be nest-tensor");
  const Pattern pat = pattern_nest_tensor(d, *window);

  s.outputs["method"] = o.method;
  s.outputs["window"] = json{{"d", d}, {"n", window->bound()}, {"c", c}};
  int code = kOk;
  FactorResult res;
  if (o.method == "cholesky") {
    res = cholesky_ll(q);
  } else if (o.method == "reverse") {
    res = reverse_cholesky(q);
  } else if (o.method == "poset") {
    FeasibilityReport rep = poset_feasibility(q, pat);
    s.outputs["feasible"] = rep.feasible;
    s.outputs["certificate"] = violations_json(rep.certificate);
    if (!rep.feasible) return kInfeasible;
    res.factor = std::move(*rep.factor);
    res.rank = static_cast<int>(q.rows());
    res.residual_fro = (res.factor * res.factor.adjoint() - q).norm();
  } else if (o.method == "hotel") {
    const int extra = o.extra_cols >= 0 ? o.extra_cols : static_cast<int>(window->size());
    HotelResult h = hotel_factor(q, pat, extra);
    s.outputs["universal"] = indices_json(h.universal);
    res = std::move(h.result);
  } else {
    throw InputError("--method must be cholesky, reverse, poset or hotel");
  }
  s.outputs["rank"] = res.rank;
  s.outputs["canonical"] = res.canonical;
  s.residuals["fro"] = res.residual_fro;
  const json fj = io::matrix_to_json(res.factor);
  if (o.out.empty()) s.outputs["factor"] = fj;
  else io::write_file(o.out, io::dump(fj, 1) + "\n");
  return code;
}

struct VerifyOpts {
  std::string factor, input, pattern = "none";
  int d = 1, block = 1;
  double tol = FactorDefaults::verify_rel;
};

int cmd_verify(Session& s, const VerifyOpts& o) {
  if (o.factor.empty() || o.input.empty()) throw InputError("verify needs --factor and --input");
  const DenseMatrix b = s.read_matrix(o.factor);
  const DenseMatrix q = s.read_matrix(o.input);
  if (b.rows() != q.rows() || q.rows() != q.cols()) throw InputError("verify: factor and input shapes differ");
  std::optional<Pattern> pat;
  if (o.pattern == "nest-tensor") {
    const Window w = infer_window(q.rows(), o.d, o.block);
    const auto cols = b.cols();
    if (cols % o.block != 0 || cols < q.cols()) throw InputError("verify: factor columns do not fit the window");
    const int extra = static_cast<int>((cols - q.cols()) / o.block);
    std::vector<MultiIndex> col_idx = w.indices();
    const auto uni = universal_columns(o.d, w.bound(), extra);
    col_idx.insert(col_idx.end(), uni.begin(), uni.end());
    pat = pattern_nest_tensor(o.d, w, std::move(col_idx));
  } else if (o.pattern != "none") {
    throw InputError("--pattern must be none or nest-tensor");
  }
  const VerifyReport rep = verify_factor(b, q, pat ? &*pat : nullptr, o.tol);
  s.outputs["ok"] = rep.ok;
  s.outputs["violations"] = violations_json(rep.violations);
  s.residuals["fro"] = rep.residual_fro;
  s.residuals["tol"] = o.tol * (1.0 + q.norm());
  return rep.ok ? kOk : kVerificationFailed;
}

struct ConvergeOpts {
  std::string op_file, symbol, schedule = "8,16,32,64,128", csv;
  int compare_n = 4;
  double tol = 1e-8;
};

int cmd_converge(Session& s, const ConvergeOpts& o) {
  const std::vector<int> schedule = parse_ints(o.schedule);
  if (schedule.empty()) throw InputError("--schedule is empty");
  std::optional<BlockOperator> op;
  if (!o.op_file.empty()) op = s.read_operator(o.op_file);
  else if (!o.symbol.empty()) op = toeplitz_operator(s.read_symbol(o.symbol), schedule.back());
  else throw InputError("converge needs --operator or --symbol");
  const ConvergenceReport rep = truncation_study(*op, schedule, Window(op->dim(), o.compare_n), o.tol);
  if (!o.csv.empty()) write_csv(o.csv, rep.schedule, rep.deltas, rep.residuals);
  s.outputs["schedule"] = rep.schedule;
  s.outputs["deltas"] = rep.deltas;
  s.outputs["converged"] = rep.converged;
  s.residuals["compare"] = rep.residuals;
  return rep.converged ? kOk : kConvergenceFailure;
}

struct RkhsOpts {
  std::string op_file, op = "gram", J = "0", J2, v, v2, point;
  int window = -1, columns = -1, stored_bound = -1;
};

int cmd_rkhs(Session& s, const RkhsOpts& o) {
  if (o.op_file.empty()) throw InputError("rkhs needs --operator");
  const BlockOperator op = s.read_operator(o.op_file);
  const int c = op.block_size();
  const MultiIndex j = MultiIndex(parse_ints(o.J));
  if (j.dim() != op.dim()) throw InputError("--J has the wrong dimension");
  const Window w(op.dim(), o.window >= 0 ? o.window : std::max(op.max_coord(), j.max_coord()));
  std::vector<MultiIndex> cols = w.indices();
  if (o.columns >= 0) cols.resize(std::min(cols.size(), static_cast<std::size_t>(o.columns)));
  s.outputs["op"] = o.op;

  if (o.op == "gram") {
    const MultiIndex j2 = o.J2.empty() ? j : MultiIndex(parse_ints(o.J2));
    const Complex g = gram(op, j, vector_or_unit(o.v, c), j2, vector_or_unit(o.v2, c));
    s.outputs["value"] = io::complex_to_json(g);
  } else if (o.op == "norm") {
    const NormLJ nl = norm_LJ(op, j);
    s.outputs["value"] = nl.value;
    s.outputs["lowerBound"] = nl.lower_bound;
  } else if (o.op == "cmin") {
    std::optional<DenseVector> v;
    if (!o.v.empty()) v = vector_or_unit(o.v, c);
    s.outputs["value"] = cmin(op, w, j, v);
    s.outputs["chainLower"] = std::sqrt(std::max(psd_check(op.block(j, j)).max_eig, 0.0));
    s.outputs["chainUpper"] = std::sqrt(std::max(psd_check(window_extract(op, w)).max_eig, 0.0));
  } else if (o.op == "density") {
    const auto pt = parse_complex_list(o.point.empty() ? std::string("0") : o.point);
    Point p(pt.begin(), pt.end());
    if (p.size() == 1 && op.dim() > 1) p.assign(static_cast<std::size_t>(op.dim()), pt[0]);
    KernelSpec spec{&op, std::nullopt, std::nullopt};
    if (o.stored_bound >= 0) spec.stored_bound = o.stored_bound;
    const DensityProjection dp = density_projection(spec, cols, p, vector_or_unit(o.v, c));
    s.outputs["error"] = dp.error;
    s.outputs["errorSq"] = dp.error_sq;
    s.outputs["targetNormSq"] = dp.target_norm_sq;
    s.outputs["tailBound"] = dp.tail_bound;
    s.outputs["columns"] = indices_json(cols);
  } else if (o.op == "onb") {
    const auto onb = onb_polynomials(op, cols);
    const DenseMatrix a = family_gram(op, cols);
    DenseMatrix x(a.rows(), static_cast<Eigen::Index>(onb.size()));
    json norms = json::array(), degrees = json::array();
    for (std::size_t k = 0; k < onb.size(); ++k) {
      x.col(static_cast<Eigen::Index>(k)) = onb[k].combination;
      norms.push_back(onb[k].norm);
      degrees.push_back(onb[k].poly.degree());
    }
    const DenseMatrix g = x.adjoint() * a * x;
    s.outputs["count"] = onb.size();
    s.outputs["norms"] = std::move(norms);
    s.outputs["degrees"] = std::move(degrees);
    s.residuals["gramDefect"] = onb.empty() ? 0.0 : max_abs(g - DenseMatrix::Identity(g.rows(), g.cols()));
  } else {
    throw InputError("--op must be gram, norm, cmin, density or onb");
  }
  return kOk;
}

struct ToeplitzOpts {
  std::string symbol, op = "fejer-riesz", csv, coeffs;
  int n = 8, grid = 4096;
  double tol = -1.0;
};

int cmd_toeplitz(Session& s, const ToeplitzOpts& o) {
  if (o.symbol.empty()) throw InputError("toeplitz needs --symbol");
  const Symbol sym = s.read_symbol(o.symbol);
  s.outputs["op"] = o.op;
  if (o.op == "matrix") {
    s.outputs["matrix"] = io::matrix_to_json(toeplitz_matrix(sym, o.n));
  } else if (o.op == "fejer-riesz") {
    s.outputs["coeffs"] = complex_list_json(fejer_riesz(sym).coeffs);
  } else if (o.op == "bauer") {
    const double tol = o.tol > 0 ? o.tol : 1e-8;
    const BauerResult br = bauer_factor(sym, o.n);
    std::vector<int> ns;
    std::vector<double> deltas, residuals;
    for (const auto& st : br.steps) {
      ns.push_back(st.n);
      deltas.push_back(st.delta);
      residuals.push_back(st.residual);
    }
    if (!o.csv.empty()) write_csv(o.csv, ns, deltas, residuals);
    const std::size_t keep = std::min(br.coeffs.size(), static_cast<std::size_t>(sym.degree() + 3));
    s.outputs["coeffs"] = complex_list_json(std::vector<Complex>(br.coeffs.begin(), br.coeffs.begin() + static_cast<long>(keep)));
    s.outputs["schedule"] = ns;
    s.outputs["deltas"] = deltas;
    s.residuals["fro"] = residuals;
    const bool converged = deltas.back() <= tol;
    s.outputs["converged"] = converged;
    return converged ? kOk : kConvergenceFailure;
  } else if (o.op == "logint") {
    const LogIntegral li = log_integrability(sym, o.grid);
    s.outputs["value"] = li.value;
    s.outputs["integrable"] = li.integrable;
    s.outputs["excluded"] = li.excluded;
    s.outputs["negative"] = li.negative;
  } else if (o.op == "verify") {
    const double tol = o.tol > 0 ? o.tol : 1e-10;
    const AnalyticFactor f = o.coeffs.empty() ? fejer_riesz(sym) : AnalyticFactor{parse_complex_list(o.coeffs)};
    const ToeplitzCheck chk = verify_toeplitz_factor(sym, f, o.n, tol);
    s.outputs["ok"] = chk.ok;
    s.outputs["coeffs"] = complex_list_json(f.coeffs);
    s.residuals["fro"] = chk.residual;
    return chk.ok ? kOk : kVerificationFailed;
  } else {
    throw InputError("--op must be matrix, fejer-riesz, bauer, logint or verify");
  }
  return kOk;
}

struct RangeOpts {
  std::string op = "equal", a, c;
  int d = 1, block = 1, extra_cols = -1;
  double tol = 1e-8;
};

json bound_json(const std::optional<double>& v) {
  return v ? json(*v) : json(std::numeric_limits<double>::infinity());
}

int cmd_range(Session& s, const RangeOpts& o) {
  if (o.a.empty()) throw InputError("range needs --a");
  const DenseMatrix a = s.read_matrix(o.a);
  std::optional<DenseMatrix> c;
  if (!o.c.empty()) c = s.read_matrix(o.c);
  s.outputs["op"] = o.op;
  if (o.op == "equal") {
    if (!c) throw InputError("range --op equal needs --c");
    s.outputs["equal"] = range_equal(a, *c, o.tol);
  } else if (o.op == "constants") {
    if (!c) throw InputError("range --op constants needs --c");
    const DouglasConstants dc = douglas_constants(a, *c);
    s.outputs["lambda"] = bound_json(dc.lambda);
    s.outputs["mu"] = bound_json(dc.mu);
  } else if (o.op == "demo") {
    const Window w = infer_window(a.rows(), o.d, o.block);
    const Pattern pat = pattern_nest_tensor(o.d, w);
    const int extra = o.extra_cols >= 0 ? o.extra_cols : static_cast<int>(w.size());
    const TensorNestDemo demo = tensornest_demo(a, pat, extra, c);
    s.outputs["path"] = demo.path == TensorNestDemo::Path::Poset ? "poset" : "hotel";
    s.outputs["certificate"] = violations_json(demo.certificate);
    s.outputs["factor"] = io::matrix_to_json(demo.result.factor);
    s.residuals["fro"] = demo.result.residual_fro;
  } else {
    throw InputError("--op must be equal, constants or demo");
  }
  return kOk;
}

int cmd_demo(Session& s) {
  DenseMatrix u = DenseMatrix::Identity(4, 4);
  u(1, 2) = 1.0;
  const DenseMatrix q = u * u.adjoint();
  const Window w(2, 1);
  const Pattern pat = pattern_nest_tensor(2, w);

  const FactorResult rc = reverse_cholesky(q);
  const FeasibilityReport feas = poset_feasibility(q, pat);
  const HotelResult hotel = hotel_factor(q, pat, 4);
  const VerifyReport check = verify_factor(hotel.result.factor, q, &hotel.pattern, 1e-12);

  s.outputs["indices"] = indices_json(w.indices());
  s.outputs["input"] = io::matrix_to_json(q);
  s.outputs["reverseCholesky"] = io::matrix_to_json(rc.factor);
  s.outputs["feasible"] = feas.feasible;
  s.outputs["certificate"] = violations_json(feas.certificate);
  s.outputs["hotel"] = json{{"factor", io::matrix_to_json(hotel.result.factor)},
                            {"universal", indices_json(hotel.universal)},
                            {"patternOk", check.violations.empty()}};
  s.residuals["reverseCholesky"] = rc.residual_fro;
  s.residuals["hotel"] = hotel.result.residual_fro;
  return check.ok && !feas.feasible ? kOk : kVerificationFailed;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("UPPERTRI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      throw InputError("UPPERTRI_SEED must be an unsigned integer");
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Upper-lower factorization toolkit", "uppertri"};
  app.set_version_flag("--version", std::string("uppertri ") + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  bool no_timings = false, pretty = false;
  std::optional<std::uint64_t> seed_flag;
  app.add_flag("--no-timings", no_timings, "Omit timings from the report");
  app.add_flag("--pretty", pretty, "Aligned text instead of JSON");
  app.add_option("--seed", seed_flag, "Seed (default: $UPPERTRI_SEED or 0)");

  GenOpts gen;
  auto* sc_gen = app.add_subcommand("gen", "Generate a random instance Q = U U*");
  sc_gen->add_option("--d", gen.d);
  sc_gen->add_option("--c", gen.c);
  sc_gen->add_option("--n", gen.n);
  sc_gen->add_option("--band", gen.band);
  sc_gen->add_option("--law", gen.law, "band | diagonal | full");
  sc_gen->add_option("--out", gen.out, "Operator JSON output");
  sc_gen->add_option("--factor-out", gen.factor_out, "Dense factor JSON output");

  FactorOpts fac;
  auto* sc_factor = app.add_subcommand("factor", "Factor a PSD matrix or operator window");
  sc_factor->add_option("--input", fac.input, "Matrix JSON");
  sc_factor->add_option("--operator", fac.op_file, "Operator JSON");
  sc_factor->add_option("--n", fac.n, "Window bound for --operator");
  sc_factor->add_option("--method", fac.method, "cholesky | reverse | poset | hotel");
  sc_factor->add_option("--pattern", fac.pattern, "nest-tensor");
  sc_factor->add_option("--d", fac.d);
  sc_factor->add_option("--block", fac.block, "Block size c");
  sc_factor->add_option("--extra-cols", fac.extra_cols);
  sc_factor->add_option("--out", fac.out, "Factor JSON output");

  VerifyOpts ver;
  auto* sc_verify = app.add_subcommand("verify", "Check B B* = Q and the pattern");
  sc_verify->add_option("--factor", ver.factor);
  sc_verify->add_option("--input", ver.input);
  sc_verify->add_option("--pattern", ver.pattern, "none | nest-tensor");
  sc_verify->add_option("--d", ver.d);
  sc_verify->add_option("--block", ver.block);
  sc_verify->add_option("--tol", ver.tol);

  ConvergeOpts conv;
  auto* sc_conv = app.add_subcommand("converge", "Truncation study of reverse Cholesky factors (d = 1)");
  sc_conv->add_option("--operator", conv.op_file);
  sc_conv->add_option("--symbol", conv.symbol);
  sc_conv->add_option("--schedule", conv.schedule);
  sc_conv->add_option("--compare-n", conv.compare_n);
  sc_conv->add_option("--tol", conv.tol);
  sc_conv->add_option("--csv", conv.csv);

  RkhsOpts rk;
  auto* sc_rkhs = app.add_subcommand("rkhs", "Kernel space diagnostics");
  sc_rkhs->add_option("--operator", rk.op_file);
  sc_rkhs->add_option("--op", rk.op, "gram | norm | cmin | density | onb");
  sc_rkhs->add_option("--J", rk.J);
  sc_rkhs->add_option("--J2", rk.J2);
  sc_rkhs->add_option("--v", rk.v);
  sc_rkhs->add_option("--v2", rk.v2);
  sc_rkhs->add_option("--window", rk.window);
  sc_rkhs->add_option("--columns", rk.columns, "Graded-lex prefix of the window");
  sc_rkhs->add_option("--point", rk.point);
  sc_rkhs->add_option("--stored-bound", rk.stored_bound);

  ToeplitzOpts tp;
  auto* sc_toep = app.add_subcommand("toeplitz", "Toeplitz symbol tools");
  sc_toep->add_option("--symbol", tp.symbol);
  sc_toep->add_option("--op", tp.op, "matrix | fejer-riesz | bauer | logint | verify");
  sc_toep->add_option("--n", tp.n);
  sc_toep->add_option("--grid", tp.grid);
  sc_toep->add_option("--csv", tp.csv);
  sc_toep->add_option("--coeffs", tp.coeffs);
  sc_toep->add_option("--tol", tp.tol);

  RangeOpts rg;
  auto* sc_range = app.add_subcommand("range", "Range equality, Douglas constants, factorization demo");
  sc_range->add_option("--op", rg.op, "equal | constants | demo");
  sc_range->add_option("--a", rg.a);
  sc_range->add_option("--c", rg.c);
  sc_range->add_option("--d", rg.d);
  sc_range->add_option("--block", rg.block);
  sc_range->add_option("--extra-cols", rg.extra_cols);
  sc_range->add_option("--tol", rg.tol);

  auto* sc_demo = app.add_subcommand("demo-counterexample", "The 4 x 4 nest-tensor counterexample");

  std::vector<std::string> argv_store{"uppertri"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  Session session;
  for (const auto& a : args) session.digest.add(a);
  json report;
  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  std::uint64_t seed = 0;
  try {
    seed = seed_flag ? *seed_flag : default_seed();
    if (sc_gen->parsed()) {
      report["command"] = "gen";
      code = cmd_gen(session, gen, seed);
    } else if (sc_factor->parsed()) {
      report["command"] = "factor";
      code = cmd_factor(session, fac);
    } else if (sc_verify->parsed()) {
      report["command"] = "verify";
      code = cmd_verify(session, ver);
    } else if (sc_conv->parsed()) {
      report["command"] = "converge";
      code = cmd_converge(session, conv);
    } else if (sc_rkhs->parsed()) {
      report["command"] = "rkhs";
      code = cmd_rkhs(session, rk);
    } else if (sc_toep->parsed()) {
      report["command"] = "toeplitz";
      code = cmd_toeplitz(session, tp);
    } else if (sc_range->parsed()) {
      report["command"] = "range";
      code = cmd_range(session, rg);
    } else if (sc_demo->parsed()) {
      report["command"] = "demo-counterexample";
      code = cmd_demo(session);
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergenceFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  report["toolVersion"] = kToolVersion;
  report["seed"] = seed;
  report["inputsDigest"] = session.digest.hex();
  report["outputs"] = std::move(session.outputs);
  report["residuals"] = std::move(session.residuals);
  report["exitCode"] = code;
  if (!no_timings) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    report["timings"] = json{{"seconds", dt.count()}};
  }
  out << (pretty ? pretty_text(report) : io::dump(report, 2) + "\n");
  return code;
}

}  // namespace uppertri::cli
