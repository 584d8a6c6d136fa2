#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace sqfn::detail {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, std::size_t>, Plans> plans;

  ~PlanCache() {
    for (auto& [key, p] : plans) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

// Plans are made on scratch buffers and executed with the new-array interface,
// which requires the same alignment; fftw_malloc guarantees it.
Plans& plans_for(int dim, std::size_t l0, std::size_t l1) {
  PlanCache& c = cache();
  auto key = std::make_pair(l0, dim == 1 ? std::size_t{0} : l1);
  auto it = c.plans.find(key);
  if (it != c.plans.end()) return it->second;

  std::size_t real_n = dim == 1 ? l0 : l0 * l1;
  std::size_t cplx_n = dim == 1 ? l0 / 2 + 1 : l0 * (l1 / 2 + 1);
  auto r = allocate<double>(real_n);
  auto z = allocate<fftw_complex>(cplx_n);
  Plans p;
  if (dim == 1) {
    p.forward = fftw_plan_dft_r2c_1d(static_cast<int>(l0), r.get(), z.get(), FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(static_cast<int>(l0), z.get(), r.get(), FFTW_ESTIMATE);
  } else {
    p.forward = fftw_plan_dft_r2c_2d(static_cast<int>(l0), static_cast<int>(l1), r.get(), z.get(),
                                     FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_2d(static_cast<int>(l0), static_cast<int>(l1), z.get(), r.get(),
                                      FFTW_ESTIMATE);
  }
  return c.plans.emplace(key, p).first->second;
}

}  // namespace

std::size_t nice_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

std::vector<double> fft_convolve_full(int dim, const std::vector<double>& a, Extent na,
                                      const std::vector<double>& b, Extent nb) {
  if (dim == 1) {
    na[1] = 1;
    nb[1] = 1;
  }
  Extent out{na[0] + nb[0] - 1, na[1] + nb[1] - 1};
  std::size_t l0 = nice_size(out[0]);
  std::size_t l1 = dim == 1 ? 1 : nice_size(out[1]);
  std::size_t real_n = l0 * l1;
  std::size_t cplx_n = dim == 1 ? l0 / 2 + 1 : l0 * (l1 / 2 + 1);

  auto ra = allocate<double>(real_n);
  auto rb = allocate<double>(real_n);
  auto za = allocate<fftw_complex>(cplx_n);
  auto zb = allocate<fftw_complex>(cplx_n);
  std::fill(ra.get(), ra.get() + real_n, 0.0);
  std::fill(rb.get(), rb.get() + real_n, 0.0);
  for (std::size_t i = 0; i < na[0]; ++i)
    for (std::size_t j = 0; j < na[1]; ++j) ra[i * l1 + j] = a[i * na[1] + j];
  for (std::size_t i = 0; i < nb[0]; ++i)
    for (std::size_t j = 0; j < nb[1]; ++j) rb[i * l1 + j] = b[i * nb[1] + j];

  std::lock_guard lock(cache().mutex);
  Plans& p = plans_for(dim, l0, l1);
  fftw_execute_dft_r2c(p.forward, ra.get(), za.get());
  fftw_execute_dft_r2c(p.forward, rb.get(), zb.get());
  for (std::size_t k = 0; k < cplx_n; ++k) {
    double re = za[k][0] * zb[k][0] - za[k][1] * zb[k][1];
    double im = za[k][0] * zb[k][1] + za[k][1] * zb[k][0];
    za[k][0] = re;
    za[k][1] = im;
  }
  // c2r only reads the Hermitian half, so the output is real by construction.
  fftw_execute_dft_c2r(p.backward, za.get(), ra.get());

  double scale = 1.0 / static_cast<double>(real_n);
  std::vector<double> result(out[0] * out[1]);
  for (std::size_t i = 0; i < out[0]; ++i)
    for (std::size_t j = 0; j < out[1]; ++j) result[i * out[1] + j] = ra[i * l1 + j] * scale;
  return result;
}

}  // namespace sqfn::detail
