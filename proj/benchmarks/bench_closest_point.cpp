#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mupf/mesh.hpp"
#include "test_support.hpp"

namespace {

std::vector<mupf::Vec3> queries(std::size_t n) {
  std::mt19937_64 rng(77);
  std::vector<mupf::Vec3> q;
  for (std::size_t i = 0; i < n; ++i) q.push_back(mupf::testing::random_point(rng, 0.25));
  return q;
}

// Arg: slices of the sphere; faces = 2 * slices * (stacks - 1).
void BM_ClosestPointBvh(benchmark::State& state) {
  const int slices = static_cast<int>(state.range(0));
  const mupf::TriMesh mesh = mupf::testing::lumpy_sphere(slices, slices, 0.1, 1);
  const auto q = queries(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh.closest_point(q[i++ & 1023]).distance);
  }
  state.counters["faces"] = static_cast<double>(mesh.face_count());
}

void BM_ClosestPointBruteForce(benchmark::State& state) {
  const int slices = static_cast<int>(state.range(0));
  const mupf::TriMesh mesh = mupf::testing::lumpy_sphere(slices, slices, 0.1, 1);
  const auto q = queries(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh.closest_point_brute_force(q[i++ & 1023]).distance);
  }
  state.counters["faces"] = static_cast<double>(mesh.face_count());
}

}  // namespace

BENCHMARK(BM_ClosestPointBvh)->Arg(4)->Arg(20)->Arg(60);
BENCHMARK(BM_ClosestPointBruteForce)->Arg(4)->Arg(20)->Arg(60);
