#ifndef SATK_MCSIM_HPP
#define SATK_MCSIM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace satk {

// diag(y) + H with y_j = Delta + a (j - (N+1)/2) and H a Hermitian Gaussian
// increment of time S: diagonal N(0, S), off-diagonal real and imaginary
// parts N(0, S/2) each.
struct SimConfig {
  int N = 201;  // odd
  double a = 1.0;
  double S = 1.0;
  double Delta = 0.0;
  long samples = 1000;
  std::uint64_t seed = 1;
  double R = 0.25;  // counting window [R, R + L]
  double L = 5.0;

  void validate() const;  // PreconditionError
};

struct SimOptions {
  int workers = 0;        // 0: SATKERNEL_WORKERS, else hardware concurrency
  int bins = 0;           // density bins over the window; 0 for none
  std::string raw_path;   // optional binary dump of every sample
};

struct EmpiricalStats {
  long samples = 0;
  int batches = 0;
  double mean_count = 0.0;
  double stderr_mean = 0.0;
  double var_count = 0.0;
  double stderr_var = 0.0;  // spread of per-batch variances / sqrt(batches)
  // bin edges R + i L / bins; counts summed over samples
  std::vector<double> bin_edges;
  std::vector<double> hist_counts;
  std::vector<double> density;         // counts / (samples * width)
  std::vector<double> density_stderr;  // from batch means
  long resamples = 0;                  // draws redone because of a tie
};

// Sorted eigenvalues for sample `index`. The random stream depends only on
// (seed, index), so any worker split reproduces it.
std::vector<double> sample_configuration(const SimConfig& cfg, std::uint64_t index,
                                         long* resamples = nullptr);

// Needs |R| + L <= a (N-1)/2 - 10 max(a, sqrt S). Bit-identical for any
// worker count.
EmpiricalStats estimate_variance(const SimConfig& cfg, const SimOptions& opt = {});
// Several (R, L) windows counted on the same samples; cfg.R and cfg.L unused.
std::vector<EmpiricalStats> estimate_windows(const SimConfig& cfg,
                                             const std::vector<std::pair<double, double>>& windows,
                                             const SimOptions& opt = {});

// Worker count from SATKERNEL_WORKERS (positive integer), else hardware
// concurrency; `requested` > 0 is capped by the variable.
int worker_count(int requested = 0);

// Raw sample file: "SATK", uint32 version = 1, uint64 N, uint64 samples,
// then samples x N little-endian float64 (one sample per row).
struct RawSamples {
  std::uint32_t version = 0;
  std::uint64_t N = 0;
  std::uint64_t samples = 0;
  std::vector<double> values;
};
RawSamples read_raw_samples(const std::string& path);

}  // namespace satk

#endif
