// Serial reference kernels against their OpenMP counterparts.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "satolab/ensemble.hpp"
#include "satolab/selberg.hpp"

namespace {

template <class F>
double seconds(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace satolab;
  const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  std::printf("threads=%d (omp max %d)\n", threads, omp_get_max_threads());

  const auto J = CircleInterval::from_arc(ArcInterval(kPi / 4.0, kPi / 2.0));
  for (int M : {50, 200, 735}) {
    std::vector<double> p, m;
    const double ts = seconds([&] { selberg::kernels::sample_serial(J, M, p, m); }, 3);
    const double tp = seconds([&] { selberg::kernels::sample_parallel(J, M, p, m, threads); }, 3);
    std::printf("selberg sample M=%-4d serial %.4fs parallel %.4fs speedup %.2f\n", M, ts, tp, ts / tp);
  }

  ensemble::EnsembleConfig cfg;
  cfg.x = 1e4;
  cfg.H = 20000;
  for (auto kind : {ensemble::StatisticKind::indicator, ensemble::StatisticKind::smooth}) {
    cfg.statistic = kind;
    cfg.H = kind == ensemble::StatisticKind::indicator ? 20000 : 2000;
    const ensemble::Ensemble ens(cfg);
    std::vector<double> a, b;
    const double ts = seconds([&] { a = ensemble::member_statistics_serial(ens); }, 1);
    const double tp = seconds([&] { b = ensemble::member_statistics_parallel(ens, threads); }, 1);
    std::printf("ensemble %-9s H=%-6lld serial %.4fs parallel %.4fs speedup %.2f identical=%s\n",
                kind == ensemble::StatisticKind::indicator ? "indicator" : "smooth",
                static_cast<long long>(cfg.H), ts, tp, ts / tp, a == b ? "yes" : "no");
  }
  return 0;
}
