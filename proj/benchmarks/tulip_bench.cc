#include <benchmark/benchmark.h>

#include <optional>
#include <string>

#include "tulip/enrollment.h"
#include "tulip/identity_store.h"
#include "tulip/login_gate.h"
#include "tulip/password.h"
#include "tulip/token.h"

namespace {

using namespace tulip;

constexpr UnixTime kNow = 1'700'000'000;

SigningKeyring bench_ring() { return SigningKeyring("b1", {{"b1", Bytes(32, 0x5a)}}); }

UserRecord seeded(MemoryDirectory& store, std::uint64_t count = 1'000'000'000) {
  NewUser u;
  u.username = "alice";
  u.password = "alice-pw";
  u.initial_count = count;
  return store.add_user(u);
}

void BM_MintToken(benchmark::State& state) {
  MemoryDirectory store(PasswordHashParams::fast_for_testing());
  const UserRecord alice = seeded(store);
  const auto ring = bench_ring();
  for (auto _ : state) benchmark::DoNotOptimize(mint_token(alice, kNow, 3600, ring));
}
BENCHMARK(BM_MintToken);

void BM_VerifyToken(benchmark::State& state) {
  MemoryDirectory store(PasswordHashParams::fast_for_testing());
  const auto ring = bench_ring();
  const std::string token = mint_token(seeded(store), kNow, 3600, ring);
  for (auto _ : state) benchmark::DoNotOptimize(verify_token(token, kNow, ring));
}
BENCHMARK(BM_VerifyToken);

// Arg 0: no token, 1: forged, 2: valid.
void BM_Gate(benchmark::State& state) {
  MemoryDirectory store(PasswordHashParams::fast_for_testing());
  const auto ring = bench_ring();
  std::optional<std::string> token;
  if (state.range(0) > 0) token = mint_token(seeded(store), kNow, 3600, ring);
  if (state.range(0) == 1) token->back() = token->back() == 'A' ? 'B' : 'A';
  for (auto _ : state) benchmark::DoNotOptimize(gate(token, store, ring, kNow));
}
BENCHMARK(BM_Gate)->Arg(0)->Arg(1)->Arg(2);

// Arg 0: fresh enrollment with credentials, 1: reuse of a valid token.
void BM_Enroll(benchmark::State& state) {
  MemoryDirectory store(PasswordHashParams::fast_for_testing());
  const auto ring = bench_ring();
  const ChallengePolicy policy;
  EnrollmentRequest req;
  req.username = "alice";
  req.password = "alice-pw";
  req.client_address = "10.0.0.1";
  const UserRecord alice = seeded(store);
  if (state.range(0) == 1) req.presented_token = mint_token(alice, kNow, 3600, ring);
  for (auto _ : state) benchmark::DoNotOptimize(enroll(req, store, ring, policy, kNow));
}
BENCHMARK(BM_Enroll)->Arg(0)->Arg(1);

void BM_HashPassword(benchmark::State& state) {
  const PasswordHashParams params{static_cast<std::uint64_t>(state.range(0)), 8, 1};
  for (auto _ : state) benchmark::DoNotOptimize(hash_password("correct horse", params));
}
BENCHMARK(BM_HashPassword)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
