#include <benchmark/benchmark.h>

#include "tdtt/automata.hpp"
#include "tdtt/inspection.hpp"
#include "tdtt/lookahead.hpp"
#include "tdtt/normalform.hpp"
#include "tdtt/oracle.hpp"

using namespace tdtt;

namespace {

// a left comb d2(d1(...d1(x1)...), d0) of the given unary-chain length
Term comb(int n) {
  Term t = Term::var(1);
  for (int i = 0; i < n; ++i) t = Term::sym("d1", {t});
  return Term::sym("d2", {t, Term::sym("d0")});
}

std::vector<AdviceTransducer> instances(int count, uint64_t base) {
  std::vector<AdviceTransducer> out;
  for (uint64_t s = base; out.size() < (size_t)count; ++s) {
    AdviceTransducer A = random_instance(s);
    if (validate(A).advice_bottom_up) out.push_back(std::move(A));
  }
  return out;
}

}  // namespace

static void BM_TermInterning(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(comb((int)state.range(0)));
}
BENCHMARK(BM_TermInterning)->RangeMultiplier(4)->Range(16, 1024);

static void BM_Compose(benchmark::State& state) {
  Term u = comb((int)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compose(u, u));
}
BENCHMARK(BM_Compose)->RangeMultiplier(4)->Range(16, 1024);

static void BM_Lub(benchmark::State& state) {
  // family diverging below a chain prefix of the given length
  std::vector<Pat> elems;
  for (int i = 0; i < 4; ++i)
    elems.push_back(compose(comb((int)state.range(0)), comb(i + 1)));
  for (auto _ : state) benchmark::DoNotOptimize(lub(elems));
}
BENCHMARK(BM_Lub)->RangeMultiplier(4)->Range(16, 1024);

static void BM_PrefFixpoint(benchmark::State& state) {
  auto as = instances(20, 1);
  for (auto _ : state)
    for (const AdviceTransducer& A : as)
      benchmark::DoNotOptimize(pref_fixpoint(A, Mode::uc));
}
BENCHMARK(BM_PrefFixpoint);

static void BM_Canonicalize(benchmark::State& state) {
  auto as = instances(20, 1);
  for (auto _ : state)
    for (const AdviceTransducer& A : as)
      benchmark::DoNotOptimize(canonicalize(make_earliest(A, Mode::uc)));
}
BENCHMARK(BM_Canonicalize);

static void BM_Equivalent(benchmark::State& state) {
  auto as = instances(10, 1);
  for (auto _ : state)
    for (const AdviceTransducer& A : as) {
      AdviceTransducer C = canonicalize(make_earliest(A, Mode::uc)).transducer;
      benchmark::DoNotOptimize(equivalent(A, C, Mode::uc));
    }
}
BENCHMARK(BM_Equivalent);

static void BM_Powerset(benchmark::State& state) {
  auto as = instances(20, 1);
  for (auto _ : state)
    for (const AdviceTransducer& A : as)
      benchmark::DoNotOptimize(powerset_topdown(A.advice));
}
BENCHMARK(BM_Powerset);

static void BM_RemoveLookahead(benchmark::State& state) {
  auto as = instances(20, 1);
  for (auto _ : state)
    for (const AdviceTransducer& A : as)
      benchmark::DoNotOptimize(remove_lookahead(A, Mode::uc));
}
BENCHMARK(BM_RemoveLookahead);

static void BM_RemoveInspection(benchmark::State& state) {
  std::vector<AdviceTransducer> tds;
  for (const AdviceTransducer& A : instances(60, 1)) {
    RemovalResult r = remove_lookahead(A, Mode::uc);
    if (r.success) tds.push_back(r.transducer);
  }
  for (auto _ : state)
    for (const AdviceTransducer& A : tds)
      benchmark::DoNotOptimize(remove_inspection(A, Mode::uc));
}
BENCHMARK(BM_RemoveInspection);

static void BM_EnumerateTrees(benchmark::State& state) {
  RankedAlphabet sigma{{{"g1", 2}, {"e1", 0}, {"e2", 0}}};
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_trees(sigma, (int)state.range(0)));
}
BENCHMARK(BM_EnumerateTrees)->DenseRange(3, 4);

static void BM_OracleEquiv(benchmark::State& state) {
  AdviceTransducer A = instances(1, 1).front();
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle_equiv(A, A, (int)state.range(0)));
}
BENCHMARK(BM_OracleEquiv)->DenseRange(3, 4);

BENCHMARK_MAIN();
