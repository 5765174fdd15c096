#include <memory>

#include <benchmark/benchmark.h>

#include "mupf/mupf.hpp"
#include "mupf/simulate.hpp"

namespace {

// One full recursion on the box: N particles, window m = 10.
void BM_MupfStep(benchmark::State& state) {
  auto mesh = std::make_shared<const mupf::TriMesh>(mupf::make_box({0.1, 0.3, 0.2}));
  mupf::ScenarioSpec spec;
  spec.true_pose = {0.05, -0.03, 0.02, 0.4, -0.2, 0.6};
  spec.measurements = 15;
  spec.noise_sigma = 0.001;
  const auto ys = mupf::sample_contacts(spec, *mesh).measurements;

  mupf::FilterConfig cfg;
  cfg.particles = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  const auto model = mupf::make_model(mesh, cfg);
  mupf::FilterState s = mupf::init(cfg);
  for (std::size_t k = 0; k < 10; ++k) mupf::step(s, ys[k], model, cfg);

  std::size_t k = 10;
  for (auto _ : state) {
    mupf::step(s, ys[k++ % ys.size()], model, cfg);
    benchmark::DoNotOptimize(s.proposal.weight.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ExtractPose(benchmark::State& state) {
  auto mesh = std::make_shared<const mupf::TriMesh>(mupf::make_box({0.1, 0.3, 0.2}));
  mupf::ScenarioSpec spec;
  spec.measurements = 10;
  const auto ys = mupf::sample_contacts(spec, *mesh).measurements;
  mupf::FilterConfig cfg;
  cfg.particles = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  const auto model = mupf::make_model(mesh, cfg);
  mupf::FilterState s = mupf::init(cfg);
  for (const auto& y : ys) mupf::step(s, y, model, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(mupf::extract_pose(s, model, cfg).particle);
}

}  // namespace

BENCHMARK(BM_MupfStep)->Arg(100)->Arg(700)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractPose)->Arg(100)->Arg(700)->Unit(benchmark::kMillisecond);
