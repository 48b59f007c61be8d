#pragma once

#include <concepts>
#include <type_traits>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "echosim/hash.hpp"
#include "echosim/random.hpp"
#include "echosim/world/env.hpp"

namespace echosim::harness {

// Anything with reset(seed) and step(action) returning an Observation.
template <class E>
concept SteppableEnv = requires(E e, std::uint64_t seed, world::Action a) {
  { e.reset(seed) } -> std::convertible_to<const world::Observation&>;
  { e.step(a) } -> std::convertible_to<const world::Observation&>;
};

struct AuditResult {
  bool passed = true;
  // Index into the observation stream (0 = initial reset) of the first
  // mismatch, or -1.
  long first_divergent_step = -1;
  int env_index = -1;
  int worker_count = 0;  // the worker count whose run disagreed with the first
  std::string message;
};

// Replays `script` on n_envs environments (seeds seed, seed+1, ...) under each
// worker count and compares the per-step observation hashes. Episodes that
// finish early are reset with derived seeds, as in run_batch.
template <class Factory>
  requires SteppableEnv<std::invoke_result_t<Factory&>>
AuditResult determinism_audit(Factory make_env, std::uint64_t seed, std::span<const world::Action> script,
                              std::span<const int> worker_counts, int n_envs = 4) {
  using Stream = std::vector<std::uint64_t>;
  auto run = [&](int workers) {
    std::vector<Stream> streams(static_cast<std::size_t>(n_envs));
    std::vector<decltype(make_env())> envs;
    envs.reserve(static_cast<std::size_t>(n_envs));
    for (int i = 0; i < n_envs; ++i) envs.push_back(make_env());
    {
      std::vector<std::jthread> threads;
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          for (int i = w; i < n_envs; i += workers) {
            auto& env = envs[static_cast<std::size_t>(i)];
            auto& out = streams[static_cast<std::size_t>(i)];
            const std::uint64_t env_seed = seed + static_cast<std::uint64_t>(i);
            std::uint64_t episode = 0;
            out.push_back(world::hash_observation(env.reset(env_seed)));
            for (const auto action : script) {
              const auto& obs = env.step(action);
              std::uint64_t h = world::hash_observation(obs);
              if (obs.done) {
                Fnv1a f;
                f.value(h);
                f.value(world::hash_observation(env.reset(derive_seed(env_seed, ++episode))));
                h = f.digest();
              }
              out.push_back(h);
            }
          }
        });
      }
    }
    return streams;
  };

  AuditResult result;
  if (worker_counts.empty()) return result;
  const auto reference = run(worker_counts[0]);
  for (std::size_t k = 1; k < worker_counts.size(); ++k) {
    const auto other = run(worker_counts[k]);
    for (int i = 0; i < n_envs; ++i) {
      const auto& a = reference[static_cast<std::size_t>(i)];
      const auto& b = other[static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] != b[s]) {
          if (!result.passed && result.first_divergent_step <= static_cast<long>(s)) break;
          result.passed = false;
          result.first_divergent_step = static_cast<long>(s);
          result.env_index = i;
          result.worker_count = worker_counts[k];
          break;
        }
      }
    }
  }
  if (!result.passed) {
    result.message = "observation streams diverge at step " + std::to_string(result.first_divergent_step) +
                     " (env " + std::to_string(result.env_index) + ", workers " +
                     std::to_string(worker_counts[0]) + " vs " + std::to_string(result.worker_count) + ")";
  }
  return result;
}

}  // namespace echosim::harness
