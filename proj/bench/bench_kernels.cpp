// Serial reference vs OpenMP path for the hot kernels. Also checks that both
// paths produce identical results, since a fast wrong answer is useless.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "pss/ensemble.hpp"
#include "pss/eval.hpp"
#include "pss/synth.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? static_cast<std::size_t>(std::atol(argv[1])) : 2000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("rows %zu, reps %d, omp threads %d\n", n, reps, omp_get_max_threads());

  pss::ScaleDefinition scale;
  auto profile = pss::default_profile();
  profile.population_size = n;
  const auto data = pss::synth_generate(profile, scale);
  const auto records = pss::score_dataset(scale, data.sheets);
  const auto x = pss::FeatureMatrix::from_sheets(data.sheets, scale);
  const auto y = pss::LabelMatrix::from_records(records);
  const auto y0 = y.column(0);

  auto rf = pss::default_spec("rf");
  pss::EnsembleModel fs, fp;
  const double t_fs = time_ms([&] { fs = pss::fit_forest(x, y0, rf.params, pss::Exec::serial); }, reps);
  const double t_fp = time_ms([&] { fp = pss::fit_forest(x, y0, rf.params, pss::Exec::parallel); }, reps);
  row("forest fit", t_fs, t_fp, fs == fp);

  std::vector<std::uint8_t> ps, pp;
  const double t_ps = time_ms([&] { ps = fs.predict(x, pss::Exec::serial); }, reps);
  const double t_pp = time_ms([&] { pp = fs.predict(x, pss::Exec::parallel); }, reps);
  row("forest batch predict", t_ps, t_pp, ps == pp);

  pss::SplitSpec split;
  const auto models = std::vector<pss::ModelSpec>{pss::default_spec("dt"), pss::default_spec("ada"),
                                                  pss::default_spec("gb")};
  pss::ExperimentReport es, ep;
  const double t_es = time_ms([&] { es = pss::run_experiment(x, y, models, split, pss::Exec::serial); }, 1);
  const double t_ep = time_ms([&] { ep = pss::run_experiment(x, y, models, split, pss::Exec::parallel); }, 1);
  bool same = es.cells.size() == ep.cells.size();
  for (std::size_t i = 0; same && i < es.cells.size(); ++i) {
    same = es.cells[i].averaged.f1 == ep.cells[i].averaged.f1 && es.cells[i].importance == ep.cells[i].importance;
  }
  row("experiment grid", t_es, t_ep, same);
  return 0;
}
