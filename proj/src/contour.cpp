#include "satk/contour.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "satk/errors.hpp"
#include "satk/quadrature.hpp"

namespace satk {

namespace {

const cplx I(0.0, 1.0);

cplx cexpm1(cplx s) {
  if (std::abs(s) < 1e-2) {
    cplx t = s, sum = s;
    for (int k = 2; k < 12; ++k) {
      t *= s / double(k);
      sum += t;
    }
    return sum;
  }
  return std::exp(s) - 1.0;
}

// log(e^s - 1) on some branch; only ever exponentiated after summing.
cplx log_expm1(cplx s) {
  if (s.real() > 1.0) return s + std::log(1.0 - std::exp(-s));
  return std::log(cexpm1(s));
}

// i h sum f(L + i t_m), t_m = (m + 1/2) h. With trunc <= 0 each side stops
// once |f| has stayed below 1e-18 of the running max over quiet_len.
cplx line_sum(const std::function<cplx(cplx)>& f, double L, double h,
              double trunc, double quiet_len) {
  cplx sum = 0.0;
  double fmax = 0.0;
  const int max_nodes = 4000000;
  for (int side : {1, -1}) {
    int quiet = 0;
    for (int m = 0; m < max_nodes; ++m) {
      const double t = side * (m + 0.5) * h;
      if (trunc > 0.0 && std::abs(t) > trunc) break;
      const cplx val = f(cplx(L, t));
      sum += val;
      const double av = std::abs(val);
      if (!std::isfinite(av))
        throw NumericalFailure("non-finite integrand on Gamma_L at t = " +
                                   std::to_string(t),
                               av);
      fmax = std::max(fmax, av);
      if (trunc <= 0.0) {
        quiet = (av <= 1e-18 * fmax) ? quiet + 1 : 0;
        if (quiet >= 8 && quiet * h >= quiet_len) break;
        if (m == max_nodes - 1)
          throw NumericalFailure("integrand on Gamma_L does not decay", av);
      }
    }
  }
  return I * h * sum;
}

ContourResult finish(cplx val, double err) {
  ContourResult r;
  r.value = val.real();
  r.imag = val.imag();
  r.err = err;
  if (std::abs(r.imag) > 1e-9 * std::max(1.0, std::abs(r.value)))
    throw NumericalFailure("contour quadrature left an imaginary part", r.imag);
  return r;
}

// Run eval(h), optionally again at h/2; value from the finer run.
ContourResult refine_run(const std::function<cplx(double)>& eval, double h,
                         bool refine) {
  cplx v = eval(h);
  if (!refine) return finish(v, 0.0);
  cplx v2 = eval(0.5 * h);
  return finish(v2, std::abs(v2 - v));
}

double default_step(const ContourSpec& spec, double xi_max, double s_eff) {
  if (spec.nodes_per_unit > 0) return 1.0 / spec.nodes_per_unit;
  return 0.8 * 2.0 * kPi / (xi_max + 10.0 / std::sqrt(s_eff));
}

struct ZNode {
  cplx z;
  cplx wdz;
};

// Counterclockwise rectangle, composite Gauss-Legendre on each side.
std::vector<ZNode> rectangle_nodes(double xl, double xr, double hy,
                                   double panel, int order) {
  std::vector<ZNode> out;
  const cplx corners[5] = {cplx(xl, -hy), cplx(xr, -hy), cplx(xr, hy),
                           cplx(xl, hy), cplx(xl, -hy)};
  for (int e = 0; e < 4; ++e) {
    const cplx p0 = corners[e], p1 = corners[e + 1];
    const double len = std::abs(p1 - p0);
    const int panels = std::max(1, int(std::ceil(len / panel)));
    for (int p = 0; p < panels; ++p) {
      QuadRule g = gauss_legendre(order, double(p) / panels, double(p + 1) / panels);
      for (int i = 0; i < order; ++i)
        out.push_back({p0 + g.x[i] * (p1 - p0), g.w[i] * (p1 - p0)});
    }
  }
  return out;
}

double mean_spacing(const std::vector<double>& y, double fallback) {
  if (y.size() < 2) return fallback;
  return (y.back() - y.front()) / double(y.size() - 1);
}

bool has_L(const ContourSpec& s) { return !std::isnan(s.L_offset); }

}  // namespace

void FiniteModel::validate() const {
  if (y.empty()) throw ConfigurationError("finite model: no initial points");
  for (std::size_t j = 1; j < y.size(); ++j)
    if (!(y[j] > y[j - 1]))
      throw ConfigurationError("finite model: y must be strictly increasing");
  if (!(a > 0.0) || !(S > 0.0) || !(T > 0.0))
    throw ConfigurationError("finite model: a, S, T must be positive");
  if (boundary == Boundary::free) {
    if (std::isfinite(T) && N() % 2 == 0)
      throw ConfigurationError("finite model: free case needs odd N = 2n+1");
  } else {
    // a reflecting path may start at the origin
    const bool ok = boundary == Boundary::reflecting ? y.front() >= 0.0 : y.front() > 0.0;
    if (!ok) throw ConfigurationError("finite model: boundary case needs y_1 > 0");
    if (std::isfinite(T))
      throw ConfigurationError("finite model: boundary kernels only for T = inf");
  }
}

FiniteModel FiniteModel::equidistant(int N, double a, double S, double T,
                                     Boundary b, double Delta) {
  FiniteModel m;
  m.a = a;
  m.S = S;
  m.T = T;
  m.boundary = b;
  if (b == Boundary::free) {
    if (N % 2 == 0) throw ConfigurationError("equidistant free model needs odd N");
    const int n = (N - 1) / 2;
    for (int k = -n; k <= n; ++k) m.y.push_back(Delta + a * k);
  } else {
    for (int k = 1; k <= N; ++k) m.y.push_back(a * k);
  }
  return m;
}

// ---------------------------------------------------------------- finite T

ContourResult kernel_finite_ST(const FiniteModel& m, const ContourSpec& spec,
                               double u, double v) {
  m.validate();
  if (!std::isfinite(m.T) || m.boundary != Boundary::free)
    throw ConfigurationError("kernel_finite_ST: needs finite T and free boundary");
  const int N = m.N(), n = (N - 1) / 2;
  const double S = m.S, T = m.T, c = S + T, al = m.a / c;
  const double sp = mean_spacing(m.y, m.a);
  const double xl = m.y.front() - 0.5 * sp, xr = m.y.back() + 0.5 * sp;
  const double hy = std::min(0.5 * sp, kPi * c / m.a);
  const double gap = spec.gap > 0.0 ? spec.gap : 0.5 * sp;
  if (gap < 0.1 * sp) throw ConfigurationError("kernel_finite_ST: gap below 0.1 a");
  const double s0 = c * v / T, s_eff = S * c / T;
  double L;
  if (has_L(spec)) {
    L = spec.L_offset;
    if (L > xl - 0.1 * sp && L < xr + 0.1 * sp)
      throw ConfigurationError("kernel_finite_ST: Gamma_L intersects gamma");
  } else {
    L = (std::abs(xr + gap - s0) <= std::abs(xl - gap - s0)) ? xr + gap : xl - gap;
  }
  const double dist = std::min(std::abs(L - xl), std::abs(L - xr));

  auto logprod = [&](cplx z) {
    cplx s = 0.0;
    for (double yj : m.y) s += al * yj + log_expm1(al * (z - yj));
    return s;
  };
  auto lW = [&](cplx w) {
    return (w - v) * (w - v) / (2.0 * S) - w * w / (2.0 * c) - double(n) * al * w +
           logprod(w);
  };
  auto lZ = [&](cplx z) {
    return -(z - u) * (z - u) / (2.0 * S) + z * z / (2.0 * c) +
           double(n) * al * z - logprod(z);
  };

  const double panel = 0.5 * std::min(hy, 0.5 * sp);
  std::vector<ZNode> zn = rectangle_nodes(xl, xr, hy, panel, 16);
  std::vector<cplx> lz(zn.size());
  double sz = -INFINITY;
  for (std::size_t i = 0; i < zn.size(); ++i) {
    lz[i] = lZ(zn[i].z);
    sz = std::max(sz, lz[i].real());
  }
  std::vector<cplx> zv(zn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) zv[i] = std::exp(lz[i] - sz) * zn[i].wdz;
  const double sw = lW(cplx(L, 0.0)).real();

  auto integrand = [&](cplx w) {
    cplx inner = 0.0;
    for (std::size_t i = 0; i < zn.size(); ++i)
      inner += zv[i] * al / cexpm1(al * (w - zn[i].z));
    return std::exp(lW(w) - sw) * inner;
  };
  const double xi = n * al + std::abs(L - s0) / s_eff;
  const double h = std::min(dist / 6.0, default_step(spec, xi, s_eff));
  auto eval = [&](double hh) {
    cplx s = line_sum(integrand, L, hh, spec.trunc, 3.0 * std::sqrt(s_eff));
    return s * std::exp(sw + sz) / ((2.0 * kPi * I) * (2.0 * kPi * I) * S);
  };
  return refine_run(eval, h, spec.refine);
}

ContourResult kernel_finite_ST_residue(const FiniteModel& m,
                                       const ContourSpec& spec, double u,
                                       double v) {
  m.validate();
  if (!std::isfinite(m.T) || m.boundary != Boundary::free)
    throw ConfigurationError("kernel_finite_ST_residue: needs finite T, free");
  const int N = m.N(), n = (N - 1) / 2;
  const double S = m.S, T = m.T, c = S + T, al = m.a / c;
  const double s0 = c * v / T, s_eff = S * c / T;
  const double L = has_L(spec) ? spec.L_offset : s0;

  // coefficients exp(-(y_k-u)^2/2S + y_k^2/2c + n al y_k) / Omega'(X_k)
  std::vector<double> la(N), sg(N);
  for (int k = 0; k < N; ++k) {
    double lg = 0.0, s = 1.0;
    for (int j = 0; j < N; ++j) {
      if (j == k) continue;
      const double e = std::expm1(al * (m.y[k] - m.y[j]));
      lg += al * m.y[j] + std::log(std::abs(e));
      if (e < 0) s = -s;
    }
    const double yk = m.y[k];
    la[k] = -(yk - u) * (yk - u) / (2.0 * S) + yk * yk / (2.0 * c) + n * al * yk - lg;
    sg[k] = s;
  }

  auto integrand = [&](cplx w) {
    std::vector<cplx> lx(N);
    cplx lp = 0.0;
    for (int j = 0; j < N; ++j) {
      lx[j] = al * m.y[j] + log_expm1(al * (w - m.y[j]));
      lp += lx[j];
    }
    const cplx base = (w - v) * (w - v) / (2.0 * S) - w * w / (2.0 * c) -
                      double(n) * al * w + lp;
    cplx s = 0.0;
    for (int k = 0; k < N; ++k) s += sg[k] * std::exp(base - lx[k] + la[k]);
    return s;
  };
  const double h = default_step(spec, n * al + std::abs(L - s0) / s_eff, s_eff);
  auto eval = [&](double hh) {
    cplx s = line_sum(integrand, L, hh, spec.trunc, 3.0 * std::sqrt(s_eff));
    return s / (2.0 * kPi * I * S);
  };
  return refine_run(eval, h, spec.refine);
}

// ---------------------------------------------------------------- T = inf

ContourResult kernel_finite_free(const FiniteModel& m, const ContourSpec& spec,
                                 double u, double v) {
  m.validate();
  if (std::isfinite(m.T) || m.boundary != Boundary::free)
    throw ConfigurationError("kernel_finite_free: needs T = inf, free boundary");
  const int N = m.N();
  const double S = m.S;
  const double L = has_L(spec) ? spec.L_offset : v;
  // exponential type of the Lagrange basis ~ pi / mean spacing
  const double sp = mean_spacing(m.y, m.a);

  // only k with a non-negligible Gaussian weight enter
  std::vector<int> ks;
  std::vector<double> la, sg;
  for (int k = 0; k < N; ++k) {
    const double g = (m.y[k] - u) * (m.y[k] - u) / (2.0 * S);
    if (g > 80.0) continue;
    double lg = 0.0;
    for (int j = 0; j < N; ++j)
      if (j != k) lg += std::log(std::abs(m.y[k] - m.y[j]));
    ks.push_back(k);
    la.push_back(-g - lg);
    sg.push_back(((N - 1 - k) % 2) ? -1.0 : 1.0);
  }
  if (ks.empty()) return ContourResult{};

  auto integrand = [&](cplx w) {
    cplx lp = 0.0;
    for (int j = 0; j < N; ++j) lp += std::log(w - m.y[j]);
    const cplx base = (w - v) * (w - v) / (2.0 * S) + lp;
    cplx s = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      s += sg[i] * std::exp(base - std::log(w - m.y[ks[i]]) + la[i]);
    return s;
  };
  const double h = default_step(spec, kPi / sp + std::abs(L - v) / S, S);
  auto eval = [&](double hh) {
    cplx s = line_sum(integrand, L, hh, spec.trunc, 3.0 * std::sqrt(S));
    return s / (2.0 * kPi * I * S);
  };
  return refine_run(eval, h, spec.refine);
}

ContourResult kernel_finite_boundary_residue(const FiniteModel& m,
                                             const ContourSpec& spec, double u,
                                             double v) {
  m.validate();
  if (m.boundary == Boundary::free)
    throw ConfigurationError("kernel_finite_boundary_residue: needs a boundary");
  const bool ab = m.boundary == Boundary::absorbing;
  const int N = m.N();
  const double S = m.S;
  const double L = has_L(spec) ? spec.L_offset : v;
  const double sp = m.y.back() / N;

  std::vector<int> ks;
  std::vector<double> la, sg;
  for (int k = 0; k < N; ++k) {
    const double yk = m.y[k];
    const double g = (yk - u) * (yk - u) / (2.0 * S);
    if (g > 80.0) continue;
    // e^{-(y-u)^2/2S} -+ e^{-(y+u)^2/2S} = e^{-(y-u)^2/2S} (1 -+ e^{-2yu/S})
    const double f = ab ? -std::expm1(-2.0 * yk * u / S) : 1.0 + std::exp(-2.0 * yk * u / S);
    if (f == 0.0) continue;
    double lg = 0.0, s = 1.0;
    for (int j = 0; j < N; ++j) {
      if (j == k) continue;
      const double e = (yk - m.y[j]) * (yk + m.y[j]);
      lg += std::log(std::abs(e));
      if (e < 0) s = -s;
    }
    if (f < 0) s = -s;
    if (ab) lg += std::log(yk);
    ks.push_back(k);
    la.push_back(-g + std::log(std::abs(f)) - lg);
    sg.push_back(s);
  }
  if (ks.empty()) return ContourResult{};

  auto integrand = [&](cplx w) {
    std::vector<cplx> lq(N);
    cplx lp = 0.0;
    for (int j = 0; j < N; ++j) {
      lq[j] = std::log(w - m.y[j]) + std::log(w + m.y[j]);
      lp += lq[j];
    }
    cplx base = (w - v) * (w - v) / (2.0 * S) + lp;
    cplx s = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      s += sg[i] * std::exp(base - lq[ks[i]] + la[i]);
    return ab ? w * s : s;
  };
  const double h = default_step(spec, kPi / sp + std::abs(L - v) / S, S);
  auto eval = [&](double hh) {
    cplx s = line_sum(integrand, L, hh, spec.trunc, 3.0 * std::sqrt(S));
    return s / (2.0 * kPi * I * S);
  };
  return refine_run(eval, h, spec.refine);
}

ContourResult kernel_finite_boundary(const FiniteModel& m,
                                     const ContourSpec& spec, double u,
                                     double v) {
  m.validate();
  if (m.boundary == Boundary::free)
    throw ConfigurationError("kernel_finite_boundary: needs a boundary");
  if (!(m.y.front() > 0.0))
    throw ConfigurationError("kernel_finite_boundary: gamma needs y_1 > 0");
  const bool ab = m.boundary == Boundary::absorbing;
  const double S = m.S;
  const double sp = mean_spacing(m.y, m.a);
  const double xl = m.y.front() - std::min(0.5 * sp, 0.5 * m.y.front());
  const double xr = m.y.back() + 0.5 * sp;
  const double hy = 0.5 * sp;
  const double gap = spec.gap > 0.0 ? spec.gap : 0.5 * sp;
  if (gap < 0.1 * sp) throw ConfigurationError("kernel_finite_boundary: gap below 0.1 a");

  // Gamma_L right of gamma, or on the imaginary axis when gamma leaves room
  double L;
  if (has_L(spec)) {
    L = spec.L_offset;
    const bool right = L >= xr + 0.1 * sp;
    const bool left = std::abs(L) <= xl - 0.1 * sp;
    if (!right && !left)
      throw ConfigurationError("kernel_finite_boundary: Gamma_L intersects gamma");
  } else {
    const double Lr = xr + gap;
    L = (xl >= gap && std::abs(v) < std::abs(Lr - v)) ? 0.0 : Lr;
  }
  const double dist = (L > xr) ? L - xr : xl - std::abs(L);

  auto lprod = [&](cplx z) {
    cplx s = 0.0;
    for (double yj : m.y) s += std::log(z - yj) + std::log(z + yj);
    return s;
  };
  const double panel = 0.5 * std::min(hy, xr - m.y.back());
  const double pl = 0.5 * (m.y.front() - xl);
  std::vector<ZNode> zn =
      rectangle_nodes(xl, xr, hy, std::min(panel, std::max(pl, 0.05 * sp)), 16);
  std::vector<cplx> zv(zn.size());
  for (std::size_t i = 0; i < zn.size(); ++i) {
    const cplx z = zn[i].z;
    const cplx g = std::exp(-(z - u) * (z - u) / (2.0 * S));
    const cplx g2 = std::exp(-(z + u) * (z + u) / (2.0 * S));
    zv[i] = (ab ? g - g2 : g + g2) * std::exp(-lprod(z)) * zn[i].wdz;
  }
  const double sw = ((L - v) * (L - v) / (2.0 * S));
  auto integrand = [&](cplx w) {
    cplx inner = 0.0;
    for (std::size_t i = 0; i < zn.size(); ++i) {
      const cplx z = zn[i].z;
      inner += zv[i] * (ab ? 2.0 * w : 2.0 * z) / (w * w - z * z);
    }
    return std::exp((w - v) * (w - v) / (2.0 * S) + lprod(w) - sw) * inner;
  };
  const double h = std::min(dist / 6.0, default_step(spec, std::abs(L - v) / S, S));
  auto eval = [&](double hh) {
    cplx s = line_sum(integrand, L, hh, spec.trunc, 3.0 * std::sqrt(S));
    return s * std::exp(sw) / ((2.0 * kPi * I) * (2.0 * kPi * I) * S);
  };
  return refine_run(eval, h, spec.refine);
}

// ---------------------------------------------------------------- N = inf

double segment_integral(double S, double L, double M, double u, double v) {
  const double r = u - v;
  const double pre = std::exp((v * v - u * u) / (2.0 * S) + L * r / S);
  if (std::abs(r) < 1e-12 * S) return pre * M / kPi;
  return pre * S * std::sin(M * r / S) / (kPi * r);
}

namespace {

struct StarSetup {
  PointSequence seq;
  double S;
  double M;
  double delta;
};

StarSetup star_setup(const PointSequence& in, double S, const ContourSpec& spec,
                     double v) {
  if (!(in.growth_exponent < 1.0))
    throw ConfigurationError(
        "infinite absorbing kernel: sum 1/y_j^2 diverges for growth exponent >= 1");
  in.validate();
  StarSetup st{in, S, 0.0, 0.0};
  if (st.seq.tail_cache.empty()) st.seq.prepare();
  const auto& y = st.seq.values;
  auto it = std::lower_bound(y.begin(), y.end(), std::abs(v));
  std::size_t j = std::min<std::size_t>(it - y.begin(), y.size() - 2);
  const double sp = (y.size() > 1) ? y[j + 1] - y[j] : y[0];
  st.M = spec.M > 0.0 ? spec.M : kPi * S / sp;
  st.delta = st.M / 4.0;
  return st;
}

// sum over the two gamma lines of g_{+-u}(z)/(z-w), plus the w-integral.
// Returns the pair (K*(u,v), K*(-u,v)).
std::pair<cplx, cplx> star_pair(const StarSetup& st, const ContourSpec& spec,
                                double u, double v, double h_scale) {
  const double S = st.S, M = st.M, dl = st.delta;
  // g_u lives on nodes x_i around u, g_{-u} on the mirrored nodes -x_i;
  // F even and real on the axis gives F(-x + iM) = conj F(x + iM)
  struct Line {
    double Mp;
    std::vector<double> x;
    std::vector<cplx> gp, gm;  // g_u(x_i + iM'), g_{-u}(-x_i + iM')
  };
  const double hz = 2.0 * kPi * std::min(dl, M) / 40.0 * h_scale;
  auto build = [&](double Mp) {
    Line ln;
    ln.Mp = Mp;
    const double Z = std::sqrt(80.0 * S + Mp * Mp) + 1.0;
    const int nz = int(std::ceil(2.0 * Z / hz));
    for (int i = 0; i < nz; ++i) {
      const double x = u - Z + (i + 0.5) * hz;
      const cplx z(x, Mp), zm(-x, Mp);
      const cplx lf = log_even_product(st.seq, z);
      ln.x.push_back(x);
      ln.gp.push_back(std::exp(-(z - u) * (z - u) / (2.0 * S) - std::log(z) - lf));
      ln.gm.push_back(std::exp(-(zm + u) * (zm + u) / (2.0 * S) - std::log(zm) - std::conj(lf)));
    }
    return ln;
  };
  // nodes of Gamma_L within delta of the M lines use the lower pair instead
  const Line lines[2] = {build(M), build(M - 2.0 * dl)};

  auto jhat = [&](cplx w, const Line& ln, bool minus_u) {
    const auto& g = minus_u ? ln.gm : ln.gp;
    cplx s = 0.0;
    for (std::size_t i = 0; i < ln.x.size(); ++i) {
      const double x = minus_u ? -ln.x[i] : ln.x[i];
      const cplx zu(x, ln.Mp), zl(x, -ln.Mp);
      // lower line left to right, upper line right to left
      s += std::conj(g[i]) / (zl - w) - g[i] / (zu - w);
    }
    return s * hz / (2.0 * kPi * I);
  };

  const double L = has_L(spec) ? spec.L_offset : v;
  const auto& y = st.seq.values;
  double sp = y.size() > 1 ? y[1] - y[0] : y[0];
  {
    auto it = std::lower_bound(y.begin(), y.end(), std::abs(v));
    std::size_t j = std::min<std::size_t>(it - y.begin(), y.size() - 2);
    if (y.size() > 1) sp = y[j + 1] - y[j];
  }
  const double h = default_step(spec, kPi / sp + std::abs(L - v) / S, S) * h_scale;
  // u and -u summed separately so each gets its own decay test
  auto f_sign = [&](bool minus_u) {
    return std::function<cplx(cplx)>([&, minus_u](cplx w) {
      const double t = std::abs(w.imag());
      const Line& ln = (std::abs(t - M) < dl) ? lines[1] : lines[0];
      const cplx wf = w * std::exp(log_even_product(st.seq, w));
      const double uu = minus_u ? -u : u;
      const bool inside = t < ln.Mp;
      const cplx a = wf * jhat(w, ln, minus_u) -
                     (inside ? std::exp(-(w - uu) * (w - uu) / (2.0 * S)) : 0.0);
      return std::exp((w - v) * (w - v) / (2.0 * S)) * a;
    });
  };
  const double pre_scale = -1.0 / S;
  const cplx kp = line_sum(f_sign(false), L, h, spec.trunc, 3.0 * std::sqrt(S)) * pre_scale /
       (2.0 * kPi * I);
  const cplx km = line_sum(f_sign(true), L, h, spec.trunc, 3.0 * std::sqrt(S)) * pre_scale /
       (2.0 * kPi * I);
  return {kp, km};
}

}  // namespace

ContourResult infinite_star(const PointSequence& seq, double S,
                            const ContourSpec& spec, double u, double v) {
  StarSetup st = star_setup(seq, S, spec, v);
  auto eval = [&](double scale) { return star_pair(st, spec, u, v, scale).first; };
  cplx a = eval(1.0);
  if (!spec.refine) return ContourResult{a.real(), 0.0, a.imag()};
  cplx b = eval(0.5);
  return ContourResult{b.real(), std::abs(b - a), b.imag()};
}

ContourResult kernel_infinite_absorbing(const PointSequence& seq, double S,
                                        const ContourSpec& spec, double u,
                                        double v) {
  if (u < 0.0 || v < 0.0)
    throw PreconditionError("infinite absorbing kernel lives on [0, inf)");
  StarSetup st = star_setup(seq, S, spec, v);
  auto eval = [&](double scale) {
    auto p = star_pair(st, spec, u, v, scale);
    return p.first - p.second;
  };
  return refine_run(eval, 1.0, spec.refine);
}

KernelHandle finite_kernel_handle(const FiniteModel& m, const ContourSpec& spec) {
  m.validate();
  KernelHandle h;
  h.representation = Representation::contour;
  if (m.boundary != Boundary::free) {
    h.lo = 0.0;
    h.evaluate = [m, spec](double u, double v) {
      return kernel_finite_boundary_residue(m, spec, u, v).value;
    };
  } else if (std::isfinite(m.T)) {
    h.evaluate = [m, spec](double u, double v) {
      return kernel_finite_ST_residue(m, spec, u, v).value;
    };
  } else {
    h.evaluate = [m, spec](double u, double v) {
      return kernel_finite_free(m, spec, u, v).value;
    };
  }
  return h;
}

KernelHandle infinite_absorbing_handle(const PointSequence& seq, double S,
                                       const ContourSpec& spec) {
  PointSequence p = seq;
  if (p.tail_cache.empty()) p.prepare();
  KernelHandle h;
  h.lo = 0.0;
  h.representation = Representation::contour;
  h.evaluate = [p, S, spec](double u, double v) {
    return kernel_infinite_absorbing(p, S, spec, u, v).value;
  };
  return h;
}

}  // namespace satk
