#include <atomic>
#include <random>
#include <thread>

#include "polyvf/cli.hpp"

namespace polyvf {

SweepReport sweep_classes(const SweepOptions& opts) {
  if (opts.degree < 2 || opts.samples < 1 || !(opts.box > 0.0))
    throw Error(ErrorKind::InvalidInput, "sweep needs degree >= 2, samples >= 1 and a positive box");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(-opts.box, opts.box);
  std::vector<std::vector<cplx>> coeffs(opts.samples);
  for (auto& c : coeffs) {
    c.assign(opts.degree + 1, 0.0);
    for (int i = 0; i + 1 < opts.degree; ++i) c[i] = {u(rng), u(rng)};
    c[opts.degree] = 1.0;
  }

  std::vector<std::string> cls(opts.samples);
  std::vector<int> dim(opts.samples, -1);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next++) < opts.samples;) {
      try {
        const auto g = separatrix_graph(Polynomial::from_coefficients(coeffs[i]), opts.trace, 1);
        const auto b = class_from_data(separatrix_data(g));
        cls[i] = format_bracketing(b);
        dim[i] = class_dimensions(b).dim;
      } catch (const Error&) {
      }
    }
  };
  const int threads = std::min(opts.threads > 0 ? opts.threads : default_thread_count(), opts.samples);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepReport rep;
  rep.samples = opts.samples;
  for (int i = 0; i < opts.samples; ++i) {
    if (dim[i] < 0) {
      ++rep.uncertain;
      continue;
    }
    ++rep.counts[cls[i]];
    rep.dims[cls[i]] = dim[i];
    if (dim[i] == 2 * (opts.degree - 1)) ++rep.full_dimension;
  }
  return rep;
}

}  // namespace polyvf
