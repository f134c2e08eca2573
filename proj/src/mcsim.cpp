#include "satk/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include "satk/errors.hpp"
#include "satk/linalg.hpp"

namespace satk {

void SimConfig::validate() const {
  if (N < 1 || N % 2 == 0) throw PreconditionError("SimConfig: N must be an odd positive integer");
  if (!(a > 0.0) || !(S > 0.0)) throw PreconditionError("SimConfig: a and S must be positive");
  if (!std::isfinite(Delta)) throw PreconditionError("SimConfig: Delta must be finite");
  if (samples < 1) throw PreconditionError("SimConfig: samples must be >= 1");
  if (!(L > 0.0) || !std::isfinite(R)) throw PreconditionError("SimConfig: window needs L > 0");
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t attempt) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    std::uint32_t(index >> 32), attempt};
  return std::mt19937_64(seq);
}

void check_window(const SimConfig& cfg) {
  const double bulk = cfg.a * (cfg.N - 1) / 2.0 - 10.0 * std::max(cfg.a, std::sqrt(cfg.S));
  if (std::abs(cfg.R) + cfg.L > bulk)
    throw PreconditionError("estimate_variance: window [R, R+L] not inside the bulk (|R| + L must be <= " +
                            std::to_string(bulk) + ")");
}

struct Batch {
  long n = 0;
  double mean = 0.0, m2 = 0.0;  // Welford over the counts
  std::vector<double> bins;
};

void put_le(std::ofstream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(char((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::ifstream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == EOF) throw std::runtime_error("read_raw_samples: truncated file");
    v |= std::uint64_t(std::uint8_t(c)) << (8 * i);
  }
  return v;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// standard error of the mean of v
double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

}  // namespace

std::vector<double> sample_configuration(const SimConfig& cfg, std::uint64_t index, long* resamples) {
  cfg.validate();
  const int N = cfg.N;
  const double sd_diag = std::sqrt(cfg.S), sd_off = std::sqrt(cfg.S / 2.0);
  for (std::uint32_t attempt = 0;; ++attempt) {
    auto rng = stream(cfg.seed, index, attempt);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> M(std::size_t(N) * N);
    // lower triangle only, row by row
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < i; ++j) {
        const double re = sd_off * gauss(rng);
        const double im = sd_off * gauss(rng);
        M[std::size_t(i) * N + j] = {re, im};
      }
      M[std::size_t(i) * N + i] = cfg.Delta + cfg.a * (i + 1 - (N + 1) / 2.0) + sd_diag * gauss(rng);
    }
    std::vector<double> ev = hermitian_eigenvalues(M, N);
    std::sort(ev.begin(), ev.end());
    bool tie = false;
    for (int k = 1; k < N; ++k) tie = tie || !(ev[k] - ev[k - 1] > 1e-12);
    if (!tie) return ev;
    if (resamples) ++*resamples;
    if (attempt > 100) throw NumericalFailure("sample_configuration: repeated eigenvalue ties", double(attempt));
  }
}

int worker_count(int requested) {
  int cap = 0;
  if (const char* env = std::getenv("SATKERNEL_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigurationError("SATKERNEL_WORKERS must be a positive integer");
    cap = int(v);
  }
  int n = requested > 0 ? requested : (cap > 0 ? cap : int(std::thread::hardware_concurrency()));
  if (cap > 0) n = std::min(n, cap);
  return std::max(1, n);
}

std::vector<EmpiricalStats> estimate_windows(const SimConfig& cfg,
                                             const std::vector<std::pair<double, double>>& windows,
                                             const SimOptions& opt) {
  cfg.validate();
  if (windows.empty()) throw PreconditionError("estimate_windows: no window");
  for (const auto& [R, L] : windows) {
    SimConfig c = cfg;
    c.R = R;
    c.L = L;
    c.validate();
    check_window(c);
  }
  if (opt.bins < 0) throw PreconditionError("estimate_variance: bins must be >= 0");
  const long ns = cfg.samples;
  const int nb = int(std::min<long>(ns, 40));
  const int nwin = int(windows.size());
  const int bins = opt.bins;
  std::vector<std::vector<Batch>> batches(nb, std::vector<Batch>(nwin));
  std::vector<long> resamples(nb, 0);
  const bool keep_raw = !opt.raw_path.empty();
  std::vector<double> raw(keep_raw ? std::size_t(ns) * cfg.N : 0);

  // batch b holds samples [start(b), start(b+1))
  auto start = [&](int b) { return long(b) * (ns / nb) + std::min<long>(b, ns % nb); };
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int b = next++; b < nb; b = next++) {
      for (Batch& B : batches[b]) B.bins.assign(bins, 0.0);
      for (long s = start(b); s < start(b + 1); ++s) {
        const auto ev = sample_configuration(cfg, std::uint64_t(s), &resamples[b]);
        if (keep_raw) std::copy(ev.begin(), ev.end(), raw.begin() + s * cfg.N);
        for (int w = 0; w < nwin; ++w) {
          const auto [R, L] = windows[w];
          Batch& B = batches[b][w];
          const auto lo = std::lower_bound(ev.begin(), ev.end(), R);
          const auto hi = std::upper_bound(ev.begin(), ev.end(), R + L);
          if (bins > 0) {
            const double width = L / bins;
            for (auto it = lo; it != hi; ++it) B.bins[std::min(bins - 1, int((*it - R) / width))] += 1.0;
          }
          const double c = double(hi - lo);
          ++B.n;
          const double dlt = c - B.mean;
          B.mean += dlt / double(B.n);
          B.m2 += dlt * (c - B.mean);
        }
      }
    }
  };
  const int nw = std::min(worker_count(opt.workers), nb);
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  long total_resamples = 0;
  for (long r : resamples) total_resamples += r;
  std::vector<EmpiricalStats> out;
  for (int w = 0; w < nwin; ++w) {
    const auto [R, L] = windows[w];
    const double width = bins > 0 ? L / bins : 0.0;
    EmpiricalStats st;
    st.samples = ns;
    st.batches = nb;
    st.resamples = total_resamples;
    // merge in batch order so the result does not depend on the worker split
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    std::vector<double> bmean, bvar;
    std::vector<std::vector<double>> bdens(bins);
    st.hist_counts.assign(bins, 0.0);
    for (int b = 0; b < nb; ++b) {
      const Batch& B = batches[b][w];
      const long n2 = n + B.n;
      const double dlt = B.mean - mean;
      mean += dlt * double(B.n) / double(n2);
      m2 += B.m2 + dlt * dlt * double(n) * double(B.n) / double(n2);
      n = n2;
      bmean.push_back(B.mean);
      if (B.n > 1) bvar.push_back(B.m2 / double(B.n - 1));
      for (int k = 0; k < bins; ++k) {
        st.hist_counts[k] += B.bins[k];
        bdens[k].push_back(B.bins[k] / (double(B.n) * width));
      }
    }
    st.mean_count = mean;
    st.var_count = n > 1 ? m2 / double(n - 1) : 0.0;
    st.stderr_mean = stderr_of(bmean);
    st.stderr_var = stderr_of(bvar);
    for (int k = 0; k <= bins && bins > 0; ++k) st.bin_edges.push_back(R + k * width);
    for (int k = 0; k < bins; ++k) {
      st.density.push_back(st.hist_counts[k] / (double(ns) * width));
      st.density_stderr.push_back(stderr_of(bdens[k]));
    }
    out.push_back(std::move(st));
  }

  if (keep_raw) {
    std::ofstream f(opt.raw_path, std::ios::binary);
    if (!f) throw std::runtime_error("estimate_variance: cannot open " + opt.raw_path);
    f.write("SATK", 4);
    put_le(f, 1, 4);
    put_le(f, std::uint64_t(cfg.N), 8);
    put_le(f, std::uint64_t(ns), 8);
    for (double v : raw) put_le(f, std::bit_cast<std::uint64_t>(v), 8);
    if (!f) throw std::runtime_error("estimate_variance: write failed for " + opt.raw_path);
  }
  return out;
}

EmpiricalStats estimate_variance(const SimConfig& cfg, const SimOptions& opt) {
  return estimate_windows(cfg, {{cfg.R, cfg.L}}, opt).front();
}

RawSamples read_raw_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_raw_samples: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SATK") throw std::runtime_error("read_raw_samples: bad magic");
  RawSamples r;
  r.version = std::uint32_t(get_le(in, 4));
  r.N = get_le(in, 8);
  r.samples = get_le(in, 8);
  r.values.resize(r.N * r.samples);
  for (double& v : r.values) v = std::bit_cast<double>(get_le(in, 8));
  return r;
}

}  // namespace satk
