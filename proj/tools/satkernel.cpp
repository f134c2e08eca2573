#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/uuid/detail/sha1.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "satk/approx.hpp"
#include "satk/contour.hpp"
#include "satk/errors.hpp"
#include "satk/gap.hpp"
#include "satk/kernels.hpp"
#include "satk/mcsim.hpp"
#include "satk/selftest.hpp"
#include "satk/specfun.hpp"
#include "satk/variance.hpp"

using json = nlohmann::ordered_json;
using namespace satk;

namespace {

constexpr int kExitFail = 1, kExitUsage = 2, kExitPrecondition = 3, kExitNumerical = 4;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

// "lo:step:hi", "lo:log:hi[:n]", "v1,v2,...", or a single value
std::vector<double> parse_values(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    const auto p = split(spec, ':');
    if (p.size() < 3 || p.size() > 4) throw UsageError("bad range '" + spec + "'");
    const double lo = parse_double(p[0]), hi = parse_double(p[2]);
    if (p[1] == "log") {
      const int n = p.size() == 4 ? int(parse_double(p[3])) : 50;
      if (!(lo > 0.0) || !(hi > lo) || n < 2) throw UsageError("bad log range '" + spec + "'");
      std::vector<double> v;
      for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
      v.back() = hi;
      return v;
    }
    if (p.size() != 3) throw UsageError("bad range '" + spec + "'");
    const double step = parse_double(p[1]);
    if (!(step > 0.0) || hi < lo) throw UsageError("bad range '" + spec + "'");
    const long n = long(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 10000000) throw UsageError("range too long '" + spec + "'");
    std::vector<double> v;
    for (long i = 0; i < n; ++i) v.push_back(lo + i * step);
    return v;
  }
  std::vector<double> v;
  for (const auto& t : split(spec, ',')) v.push_back(parse_double(t));
  if (v.empty()) throw UsageError("empty value list");
  return v;
}

// Runs f(i) for i < n on the worker pool; results land by index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F f) {
  std::vector<T> out(n);
  const int w = std::max(1, std::min<int>(worker_count(workers), int(n)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto run = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < w; ++k) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// A table with typed cells; serialized as CSV or JSON.
struct Report {
  std::string command;
  json parameters = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
  json extra = json::object();
};

struct Output {
  bool json_mode = false;
  int digits = 0;
  std::string out_path;
};

json rounded(const json& v, int digits) {
  if (digits <= 0 || !v.is_number_float()) return v;
  const double x = v.get<double>();
  if (!std::isfinite(x)) return v;
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", digits, x);
  return std::stod(b);
}

std::string cell(const json& v, int digits) {
  if (v.is_number_float()) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", digits > 0 ? digits : 17, v.get<double>());
    return b;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json round_all(const json& j, int digits) {
  if (j.is_array() || j.is_object()) {
    json c = j;
    for (auto& e : c) e = round_all(e, digits);
    return c;
  }
  return rounded(j, digits);
}

std::string git_hash(const std::string& content) {
  boost::uuids::detail::sha1 h;
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  h.process_bytes(blob.data(), blob.size());
  unsigned int d[5];
  h.get_digest(d);
  char b[41];
  for (int i = 0; i < 5; ++i) std::snprintf(b + 8 * i, 9, "%08x", d[i]);
  return b;
}

void emit(const Report& r, const Output& o, const std::vector<std::string>& extra_files = {}) {
  std::ostringstream s;
  if (o.json_mode) {
    json j;
    j["command"] = r.command;
    j["parameters"] = r.parameters;
    j["columns"] = r.columns;
    json rows = json::array();
    for (const auto& row : r.rows) {
      json obj = json::object();
      for (std::size_t k = 0; k < row.size(); ++k) obj[r.columns[k]] = rounded(row[k], o.digits);
      rows.push_back(obj);
    }
    j["rows"] = rows;
    j["summary"] = round_all(r.summary, o.digits);
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it) j[it.key()] = round_all(it.value(), o.digits);
    s << j.dump(2) << "\n";
  } else {
    for (std::size_t k = 0; k < r.columns.size(); ++k) s << (k ? "," : "") << r.columns[k];
    s << "\n";
    for (const auto& row : r.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << cell(row[k], o.digits);
      s << "\n";
    }
    // summary goes to stderr so stdout stays a plain table
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it)
      std::cerr << "# " << it.key() << " = " << cell(it.value(), o.digits) << "\n";
  }
  if (o.out_path.empty()) {
    std::cout << s.str();
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + o.out_path);
  f << s.str();
  f.close();
  json m;
  m["command"] = r.command;
  m["parameters"] = r.parameters;
  m["input_hash"] = git_hash(r.parameters.dump());
  m["outputs"] = json::array({o.out_path});
  for (const auto& e : extra_files) m["outputs"].push_back(e);
  std::ofstream mf(o.out_path + ".manifest.json");
  mf << m.dump(2) << "\n";
}

// Echo every option of a subcommand and of its parent: given values, else
// defaults.
json echo_parameters(const CLI::App* sub) {
  json p = json::object();
  std::vector<const CLI::Option*> opts = sub->get_options();
  if (sub->get_parent())
    for (const CLI::Option* o : sub->get_parent()->get_options()) opts.push_back(o);
  for (const CLI::Option* opt : opts) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || p.contains(name)) continue;
    std::vector<std::string> vals = opt->count() ? opt->results() : std::vector<std::string>{};
    if (vals.empty()) {
      if (opt->get_default_str().empty()) continue;
      vals = {opt->get_default_str()};
    }
    auto typed = [](const std::string& v) -> json {
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (!v.empty() && end == v.c_str() + v.size()) return x;
      return v;
    };
    if (opt->get_type_size() == 0) {
      p[name] = opt->count() > 0;
    } else if (vals.size() == 1 && opt->get_expected_max() <= 1) {
      p[name] = typed(vals[0]);
    } else {
      json a = json::array();
      for (const auto& v : vals) a.push_back(typed(v));
      p[name] = a;
    }
  }
  return p;
}

struct ModelArgs {
  double a = 1.0;
  double S = NAN;
  double d = NAN;
  double Delta = 0.0;
  double T = INFINITY;
  std::string boundary = "free";

  EquidistantModel model() const {
    if (std::isnan(S) == std::isnan(d)) throw UsageError("give exactly one of --S and --d");
    EquidistantModel m;
    m.a = a;
    m.S = std::isnan(S) ? d * a * a / (2 * kPi) : S;
    m.Delta = Delta;
    m.boundary = parse_boundary(boundary);
    m.T = T;
    return m;
  }
};

void add_model_options(CLI::App* c, ModelArgs& m) {
  c->add_option("--a", m.a, "final spacing a");
  c->add_option("--S", m.S, "time S (or give --d)");
  c->add_option("--d", m.d, "d = 2 pi S / a^2");
  c->add_option("--Delta", m.Delta, "lattice offset");
  c->add_option("--boundary", m.boundary, "free, absorbing or reflecting");
}

struct KernelArgs {
  std::string family = "LS";
  ModelArgs model;
  double nu = 0.5;
  int N = 21;
  double T = INFINITY;
  std::string F = "power:0.05";
  long prefix = 20000;
};

const std::vector<std::string> kFamilies{"sine",       "LS",        "LS-approx",     "LSS",
                                         "LSS-approx", "absorbing", "reflecting",    "bessel",
                                         "contour-finite", "contour-infinite"};

KernelHandle make_kernel(const std::string& family, const KernelArgs& k) {
  if (std::find(kFamilies.begin(), kFamilies.end(), family) == kFamilies.end())
    throw UsageError("unknown kernel family '" + family + "'");
  if (family == "sine") return sine_kernel(k.model.a);
  if (family == "bessel") return bessel_handle(k.nu);
  if (family == "contour-infinite") {
    if (std::isnan(k.model.S)) throw UsageError("contour-infinite needs --S");
    GeneralConfiguration cfg(CountingFunction::from_name(k.F), k.prefix);
    return infinite_absorbing_handle(cfg.sequence(), k.model.S);
  }
  EquidistantModel m = k.model.model();
  if (family == "contour-finite") {
    return finite_kernel_handle(FiniteModel::equidistant(k.N, m.a, m.S, k.T, m.boundary, m.Delta));
  }
  if (family == "LS" || family == "LS-approx") {
    m.T = INFINITY;
    return equidistant_kernel(m, family == "LS-approx");
  }
  if (family == "LSS" || family == "LSS-approx") {
    m.T = m.S;
    return equidistant_kernel(m, family == "LSS-approx");
  }
  if (family == "absorbing" || family == "reflecting") {
    m.boundary = parse_boundary(family);
    return equidistant_kernel(m, false);
  }
  throw UsageError("unknown kernel family '" + family + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satkernel: determinantal kernels, number variance, gap laws, Monte Carlo"};
  app.require_subcommand(0, 1);
  app.option_defaults()->always_capture_default();

  Output out;
  bool csv_mode = false, selftest_flag = false;
  int workers = 0;
  std::uint64_t seed = 1;
  std::string config_path;
  app.add_flag("--json", out.json_mode, "JSON report");
  app.add_flag("--csv", csv_mode, "CSV table (default)");
  app.add_option("--digits", out.digits, "significant digits at serialization (0: full)");
  app.add_option("--out", out.out_path, "write the report here plus a manifest");
  app.add_option("--workers", workers, "worker threads (0: automatic)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--config", config_path, "JSON file with flag values");
  app.add_flag("--selftest", selftest_flag, "run the acceptance suite");
  app.fallthrough();

  // kernel
  KernelArgs ka;
  std::vector<std::string> grid{"0:0.1:1"};
  std::string compare;
  auto* ck = app.add_subcommand("kernel", "evaluate a kernel on a grid");
  ck->fallthrough();
  ck->add_option("--family", ka.family,
                 "sine, LS, LS-approx, LSS, LSS-approx, absorbing, reflecting, bessel, contour-finite, contour-infinite");
  add_model_options(ck, ka.model);
  ck->add_option("--nu", ka.nu, "Bessel order");
  ck->add_option("--N", ka.N, "particles for contour-finite");
  ck->add_option("--T", ka.T, "end time for contour-finite");
  ck->add_option("--F", ka.F, "counting function for contour-infinite");
  ck->add_option("--prefix", ka.prefix, "explicit points for contour-infinite");
  ck->add_option("--grid", grid, "XSPEC [x YSPEC]; one spec gives the square grid")->expected(1, 3);
  ck->add_option("--compare", compare, "second family; adds a |delta| column");

  // variance
  std::string method = "leading", vfamily = "LS-approx", tail = "bound_only";
  std::string Rs = "0", Ls = "1", ds = "2", arcs = "3.141592653589793";
  double va = 1.0, cutoff = 1000.0;
  int un_n = 64;
  bool crosscheck = false;
  auto* cv = app.add_subcommand("variance", "number variance sweeps");
  cv->fallthrough();
  cv->add_option("--method", method, "direct, leading, averaged, vd, sine, un");
  cv->add_option("--family", vfamily, "kernel for the direct method");
  cv->add_option("--R", Rs, "left ends");
  cv->add_option("--L", Ls, "lengths");
  cv->add_option("--d", ds, "d values");
  cv->add_option("--a", va, "spacing");
  cv->add_option("--cutoff", cutoff, "complement cutoff for the direct method");
  cv->add_option("--tail", tail, "bound_only or mean_square");
  cv->add_option("--n", un_n, "U(n) size");
  cv->add_option("--arc", arcs, "U(n) arc lengths");
  cv->add_flag("--crosscheck", crosscheck, "direct against the leading-part closed form");

  // gap
  std::string gboundary = "absorbing", xis = "0:0.1:2";
  double ga = 1.0;
  int gorder = 0;
  auto* cg = app.add_subcommand("gap", "first-particle laws by Fredholm determinants");
  cg->fallthrough();
  cg->add_option("--boundary", gboundary, "free, absorbing or reflecting");
  cg->add_option("--a", ga, "spacing");
  cg->add_option("--xi", xis, "grid of right ends");
  cg->add_option("--order", gorder, "Nystrom order (0: refine)");

  // simulate
  SimConfig sc;
  std::vector<std::string> windows{"0.25:5.25"};
  int bins = 0;
  std::string raw;
  auto* cs = app.add_subcommand("simulate", "Monte Carlo of the Hermitian Brownian motion");
  cs->fallthrough();
  cs->add_option("--N", sc.N, "particles (odd)");
  cs->add_option("--S", sc.S, "time");
  cs->add_option("--a", sc.a, "spacing");
  cs->add_option("--Delta", sc.Delta, "offset");
  cs->add_option("--samples", sc.samples, "samples");
  cs->add_option("--window", windows, "counting windows lo:hi")->expected(1, -1);
  cs->add_option("--bins", bins, "density bins per window");
  cs->add_option("--raw", raw, "binary dump of all samples");

  // approx
  std::string F = "power:0.05", alphas = "50,100,200", cmp = "free";
  std::string offsets, sine_points;
  double aS = 1.0, aT = 2.0;
  long aprefix = 20000;
  auto* ca = app.add_subcommand("approx", "general configurations against the equidistant surrogate");
  ca->fallthrough();
  ca->add_option("--F", F, "power:<delta>, zeta-counting, unfolding");
  ca->add_option("--alpha", alphas, "heights");
  ca->add_option("--S", aS, "time");
  ca->add_option("--T", aT, "window half-width");
  ca->add_option("--comparator", cmp, "free or absorbing");
  ca->add_option("--offsets", offsets, "grid offsets from alpha (default 0.75 T {-1,0,1})");
  ca->add_option("--prefix", aprefix, "explicit points");
  ca->add_option("--sine-points", sine_points, "points for the rescaled sine distance");

  // selftest
  std::string only;
  auto* ct = app.add_subcommand("selftest", "run the acceptance suite");
  ct->fallthrough();
  app.add_option("--only", only, "selftest: criteria to run, e.g. 1,3,11");

  // --config: values fill in flags missing from the command line
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    std::ifstream f(args[i + 1]);
    if (!f) {
      std::cerr << "error: cannot read config " << args[i + 1] << "\n";
      return kExitUsage;
    }
    json cfg;
    try {
      cfg = json::parse(f);
    } catch (const std::exception& e) {
      std::cerr << "error: config: " << e.what() << "\n";
      return kExitUsage;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: config must be a JSON object\n";
      return kExitUsage;
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const std::string flag = "--" + it.key();
      if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
      auto tok = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (it.value().is_boolean()) {
        if (it.value().get<bool>()) args.push_back(flag);
      } else if (it.value().is_array()) {
        args.push_back(flag);
        for (const auto& v : it.value()) args.push_back(tok(v));
      } else {
        args.push_back(flag);
        args.push_back(tok(it.value()));
      }
    }
    break;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  if (out.json_mode && csv_mode) {
    std::cerr << "error: --json and --csv are exclusive\n";
    return kExitUsage;
  }

  try {
    if (selftest_flag || ct->parsed()) {
      SelftestOptions so;
      so.workers = workers;
      if (!only.empty())
        for (double v : parse_values(only)) so.only.push_back(int(v));
      if (!out.json_mode)
        so.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
      const auto res = run_selftest(so);
      int failed = 0;
      for (const auto& r : res) failed += !r.pass;
      if (out.json_mode) {
        Report rep;
        rep.command = "selftest";
        rep.parameters = echo_parameters(ct);
        rep.columns = {"id", "pass", "title", "detail", "seconds"};
        for (const auto& r : res) rep.rows.push_back({r.id, r.pass, r.title, r.detail, r.seconds});
        rep.summary["failed"] = failed;
        emit(rep, out);
      } else {
        std::cout << failed << " of " << res.size() << " criteria failed" << std::endl;
      }
      return failed ? kExitFail : 0;
    }

    if (ck->parsed()) {
      std::vector<double> xs, ys;
      if (grid.size() == 1) {
        xs = ys = parse_values(grid[0]);
      } else if (grid.size() == 3 && grid[1] == "x") {
        xs = parse_values(grid[0]);
        ys = parse_values(grid[2]);
      } else {
        throw UsageError("--grid takes XSPEC or XSPEC x YSPEC");
      }
      const KernelHandle K = make_kernel(ka.family, ka);
      KernelHandle K2;
      if (!compare.empty()) K2 = make_kernel(compare, ka);
      std::vector<std::pair<double, double>> pts;
      for (double x : xs)
        for (double y : ys) pts.push_back({x, y});
      using Row = std::vector<json>;
      Report rep;
      rep.command = "kernel";
      rep.parameters = echo_parameters(ck);
      rep.columns = {"x", "y", "K"};
      if (K2.evaluate) {
        rep.columns.push_back("K_compare");
        rep.columns.push_back("abs_delta");
      }
      rep.rows = parallel_map<Row>(pts.size(), workers, [&](std::size_t i) {
        const auto [x, y] = pts[i];
        Row r{x, y, K(x, y)};
        if (K2.evaluate) {
          const double k2 = K2(x, y);
          r.push_back(k2);
          r.push_back(std::abs(r[2].get<double>() - k2));
        }
        return r;
      });
      if (K2.evaluate) {
        double mx = 0.0;
        for (const auto& r : rep.rows) mx = std::max(mx, r[4].get<double>());
        rep.summary["max_abs_delta"] = mx;
      }
      emit(rep, out);
      return 0;
    }

    if (cv->parsed()) {
      using Row = std::vector<json>;
      Report rep;
      rep.command = "variance";
      rep.parameters = echo_parameters(cv);
      if (method == "un" && !crosscheck) {
        const auto arc = parse_values(arcs);
        rep.columns = {"n", "arc", "value"};
        double best = -1.0, at = 0.0;
        for (double t : arc) {
          const double v = variance_Un(un_n, t).value;
          rep.rows.push_back({un_n, t, v});
          if (v > best) best = v, at = t;
        }
        rep.summary["max_value"] = best;
        rep.summary["max_at_arc"] = at;
        emit(rep, out);
        return 0;
      }
      const auto R = parse_values(Rs), L = parse_values(Ls), D = parse_values(ds);
      struct P {
        double R, L, d;
      };
      std::vector<P> grid3;
      // sorted by parameter tuple
      for (double d : D)
        for (double r : R)
          for (double l : L) grid3.push_back({r, l, d});
      DirectOptions dopt;
      if (tail == "mean_square") dopt.tail = TailModel::mean_square;
      else if (tail != "bound_only") throw UsageError("unknown tail model '" + tail + "'");
      if (crosscheck) {
        rep.columns = {"R", "L", "d", "direct", "closed", "abs_delta"};
        rep.rows = parallel_map<Row>(grid3.size(), workers, [&](std::size_t i) {
          const auto p = grid3[i];
          const auto m = EquidistantModel::from_d(p.d, va);
          const double dir = variance_direct(kernel_LS_approx(m), p.R, p.L, cutoff, dopt).value;
          const double cl = variance_leading_part(m, p.R, p.L).value;
          return Row{p.R, p.L, p.d, dir, cl, std::abs(dir - cl)};
        });
        double mx = 0.0;
        for (const auto& r : rep.rows) mx = std::max(mx, r[5].get<double>());
        rep.summary["max_abs_delta"] = mx;
        emit(rep, out);
        return 0;
      }
      if (!(method == "direct" || method == "leading" || method == "averaged" || method == "vd" ||
            method == "sine"))
        throw UsageError("unknown method '" + method + "'");
      rep.columns = {"R", "L", "d", "method", "value", "err_estimate", "tail_warning"};
      rep.rows = parallel_map<Row>(grid3.size(), workers, [&](std::size_t i) {
        const auto p = grid3[i];
        EquidistantModel m = EquidistantModel::from_d(p.d, va);
        VarianceReport v;
        if (method == "direct") {
          KernelArgs k;
          k.model.a = va;
          k.model.d = p.d;
          v = variance_direct(make_kernel(vfamily, k), p.R, p.L, cutoff, dopt);
        } else if (method == "leading") {
          v = variance_leading_part(m, p.R, p.L);
        } else if (method == "averaged") {
          v = variance_averaged(m, p.L);
        } else if (method == "vd") {
          m.T = m.S;
          v = variance_Vd(m, p.L);
        } else {
          v = variance_sine_closed(va, p.L);
        }
        return Row{p.R, p.L, p.d, to_string(v.method), v.value, v.err_estimate, v.tail_warning};
      });
      if (method == "averaged" || method == "vd") {
        json lv = json::object();
        for (double d : D)
          lv[cell(d, 0)] = method == "averaged" ? saturation_level(d) : variance_Vd_limit(d);
        rep.summary["limit_by_d"] = lv;
      }
      emit(rep, out);
      return 0;
    }

    if (cg->parsed()) {
      const auto xi = parse_values(xis);
      const auto res = first_particle_cdf(boundary_law_kernel(parse_boundary(gboundary), ga), xi, gorder);
      Report rep;
      rep.command = "gap";
      rep.parameters = echo_parameters(cg);
      rep.columns = {"xi", "cdf", "det", "order", "err_estimate"};
      for (const auto& g : res) rep.rows.push_back({g.xi, g.cdf, g.det_value, g.order, g.err_estimate});
      emit(rep, out);
      return 0;
    }

    if (cs->parsed()) {
      sc.seed = seed;
      std::vector<std::pair<double, double>> win;
      for (const auto& w : windows) {
        const auto p = split(w, ':');
        if (p.size() != 2) throw UsageError("window must be lo:hi, got '" + w + "'");
        const double lo = parse_double(p[0]), hi = parse_double(p[1]);
        if (!(hi > lo)) throw UsageError("empty window '" + w + "'");
        win.push_back({lo, hi - lo});
      }
      SimOptions so;
      so.workers = workers;
      so.bins = bins;
      so.raw_path = raw;
      const auto st = estimate_windows(sc, win, so);
      Report rep;
      rep.command = "simulate";
      rep.parameters = echo_parameters(cs);
      rep.columns = {"lo", "hi", "samples", "batches", "mean_count", "stderr_mean", "var_count", "stderr_var",
                     "resamples"};
      json hist = json::array();
      for (std::size_t i = 0; i < st.size(); ++i) {
        const auto& s = st[i];
        rep.rows.push_back({win[i].first, win[i].first + win[i].second, s.samples, s.batches, s.mean_count,
                            s.stderr_mean, s.var_count, s.stderr_var, s.resamples});
        if (bins > 0)
          hist.push_back({{"bin_edges", s.bin_edges}, {"density", s.density}, {"density_stderr", s.density_stderr}});
      }
      if (bins > 0) rep.extra["histograms"] = hist;
      emit(rep, out, raw.empty() ? std::vector<std::string>{} : std::vector<std::string>{raw});
      return 0;
    }

    if (ca->parsed()) {
      const auto al = parse_values(alphas);
      const Comparator comp = cmp == "free"        ? Comparator::free_line
                              : cmp == "absorbing" ? Comparator::absorbing
                                                   : throw UsageError("unknown comparator '" + cmp + "'");
      std::vector<double> off = offsets.empty() ? std::vector<double>{-0.75 * aT, 0.0, 0.75 * aT}
                                                : parse_values(offsets);
      std::vector<double> sp;
      if (!sine_points.empty()) sp = parse_values(sine_points);
      const GeneralConfiguration cfg(CountingFunction::from_name(F), aprefix);
      using Row = std::vector<json>;
      Report rep;
      rep.command = "approx";
      rep.parameters = echo_parameters(ca);
      rep.columns = {"alpha", "m", "xi", "lambda", "max_lhs", "bound_shape"};
      if (!sp.empty()) rep.columns.push_back("sine_distance");
      rep.rows = parallel_map<Row>(al.size(), workers, [&](std::size_t i) {
        std::vector<std::pair<double, double>> g;
        for (double du : off)
          for (double dv : off) g.push_back({al[i] + du, al[i] + dv});
        const auto c = compare_at_height(cfg, al[i], aS, aT, g, comp);
        Row r{al[i], c.surrogate.at.m, c.surrogate.at.xi, c.surrogate.at.lambda, c.max_lhs, c.bound_shape};
        if (!sp.empty()) r.push_back(local_sine_distance(cfg, al[i], aS, sp));
        return r;
      });
      bool dec = true;
      for (std::size_t i = 1; i < rep.rows.size(); ++i)
        dec = dec && rep.rows[i][4].get<double>() < rep.rows[i - 1][4].get<double>();
      rep.summary["max_lhs_decreasing"] = dec;
      emit(rep, out);
      return 0;
    }

    std::cout << app.help();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::domain_error& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
