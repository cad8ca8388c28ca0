#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "therasim/analytics.hpp"
#include "therasim/analyst.hpp"
#include "therasim/backend.hpp"
#include "therasim/persona.hpp"
#include "therasim/selfplay.hpp"
#include "therasim/workbench.hpp"

namespace {

using namespace therasim;

void bench_render_client_prompt(benchmark::State& state) {
  const auto& sarah = persona::builtin_persona(persona::SeverityLevel::moderate);
  for (auto _ : state) {
    auto prompt = persona::render_client_prompt(sarah);
    benchmark::DoNotOptimize(prompt.text);
  }
}
BENCHMARK(bench_render_client_prompt);

void bench_parse_annotation(benchmark::State& state) {
  const std::string reply =
      "APPROACH: Solution-Focused Brief Therapy (SFBT)\n"
      "TECHNIQUES: scaling questions; goal setting; Coping Question";
  for (auto _ : state) {
    auto annotation = analyst::parse_annotation(reply, analyst::Mode::multi, "bench-0001");
    benchmark::DoNotOptimize(annotation.approach);
  }
}
BENCHMARK(bench_parse_annotation);

void bench_scripted_session(benchmark::State& state) {
  const int turns = static_cast<int>(state.range(0));
  std::vector<std::string> therapist;
  std::vector<std::string> client;
  for (int i = 1; i <= turns; ++i) {
    if (i >= 2) therapist.push_back("therapist line " + std::to_string(i));
    client.push_back("client line " + std::to_string(i));
  }

  selfplay::SessionConfig config;
  config.persona = persona::builtin_persona(persona::SeverityLevel::moderate);
  config.turns_per_agent = turns;
  config.session_id = "bench-0001";
  config.created_at = "1970-01-01T00:00:00Z";

  for (auto _ : state) {
    llm::ScriptedBackend backend(
        llm::ScriptedBackend::Script{{"therapist", therapist}, {"client", client}});
    auto transcript = selfplay::run_session(config, backend);
    benchmark::DoNotOptimize(transcript.turns);
  }
}
BENCHMARK(bench_scripted_session)->Arg(10);

void bench_approach_distribution(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937 rng(7);
  const auto& approaches = analyst::approach_taxonomy();
  std::uniform_int_distribution<std::size_t> pick(0, approaches.size() - 1);
  std::uniform_int_distribution<int> rank(0, 4);

  std::vector<analyst::Annotation> annotations;
  analytics::SeverityIndex index;
  for (std::int64_t i = 0; i < n; ++i) {
    analyst::Annotation a;
    a.session_id = "s-" + std::to_string(i);
    a.mode = analyst::Mode::single;
    a.approach = approaches[pick(rng)].canonical_name;
    a.techniques = {"open questions"};
    annotations.push_back(std::move(a));
    index["s-" + std::to_string(i)] = rank(rng);
  }

  for (auto _ : state) {
    auto table =
        analytics::approach_distribution(annotations, index, analytics::Grouping::severity);
    benchmark::DoNotOptimize(table.rows);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_approach_distribution)->Arg(1000)->Arg(100000);

void bench_transcript_jsonl_roundtrip(benchmark::State& state) {
  selfplay::Transcript t;
  t.session_id = "bench-0001";
  t.persona_id = "moderate";
  t.severity_rank = 2;
  t.created_at = "1970-01-01T00:00:00Z";
  t.complete = true;
  for (int i = 0; i < 20; ++i) {
    t.turns.push_back({i, i % 2 == 0 ? selfplay::Speaker::therapist : selfplay::Speaker::client,
                       "a fairly typical message with some length to it, number " +
                           std::to_string(i)});
  }
  for (auto _ : state) {
    auto line = workbench::transcript_to_jsonl(t);
    auto back = workbench::transcript_from_jsonl(line);
    benchmark::DoNotOptimize(back.turns);
  }
}
BENCHMARK(bench_transcript_jsonl_roundtrip);

}  // namespace

BENCHMARK_MAIN();
