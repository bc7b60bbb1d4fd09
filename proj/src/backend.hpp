// Copyright 2026 The contamkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace contamkit {

struct GenerationParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 512;
  std::vector<std::string> stop_sequences;
};

struct TokenLogProb {
  std::string token_text;
  std::optional<double> logprob;  // absent for the first token (no context)
  int position = 0;
};

struct BackendCapabilities {
  bool supports_completion = false;
  bool supports_chat = false;
  bool supports_token_scoring = false;
};

struct Completion {
  std::string text;
  std::string finish_reason;
};

// Uniform access to a text model. Implementations must be safe for
// concurrent use; mocks are referentially transparent in (script, seed,
// prompt).
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual BackendCapabilities capabilities() const = 0;
  virtual std::string model_id() const = 0;

  virtual Completion complete(const std::string& prompt,
                              const GenerationParams& params);
  virtual std::vector<TokenLogProb> score_tokens(const std::string& text);

  // Deterministic backends (mocks, replay) need no journal for reproducibility.
  virtual bool deterministic() const { return false; }
};

// Sum of present token log-probabilities of a teacher-forced scoring.
double total_logprob(const std::vector<TokenLogProb>& tokens);

// ---- scripted mocks ----

struct MockScript {
  enum class CompletionMode {
    None,
    EchoSuffix,           // marker echo + memorized-reference completion
    FixedChoice,          // "The correct answer is (X)"
    SeededUniformChoice,  // uniform letter, pure in (seed, prompt)
    Canned,               // exact-match table on collapsed prompt
    FixedText,            // constant completion
    PerturbOptions,       // well-formed "Option i - ..." quiz generator
  };
  enum class ScoringMode {
    None,
    Table,  // exact-match on collapsed text -> per-token logprobs
    Hash,   // pure function of (seed, tokens) with optional order bonus
  };

  CompletionMode completion_mode = CompletionMode::None;
  ScoringMode scoring_mode = ScoringMode::None;
  uint64_t seed = 0;
  std::string model = "mock";
  bool chat = false;

  // EchoSuffix
  std::string echo_marker = "«REF»";
  std::string echo_guard;                // completion gated on this substring
  std::string echo_fallback = "I cannot continue this text.";
  std::vector<std::string> references;  // memorized texts, whitespace-collapsed

  // FixedChoice
  char fixed_letter = 'A';

  // SeededUniformChoice
  std::string letters = "ABCD";
  std::string answer_prefix = "The correct answer is";

  // Canned / FixedText
  std::map<std::string, std::string> canned;  // collapsed prompt -> text
  std::optional<std::string> canned_default;
  std::string fixed_text;

  // Table scoring: collapsed text -> per-token logprobs (null = no context)
  std::map<std::string, std::vector<std::optional<double>>> logprob_table;

  // Hash scoring
  double hash_noise = 1.0;        // stddev of the whole-text jitter, in nats
  double ordered_bonus = 0.0;     // added when order_table entries ascend
  std::vector<std::string> order_table;  // texts in canonical order

  static MockScript from_json(const nlohmann::json& spec);
};

class MockBackend : public ModelBackend {
 public:
  explicit MockBackend(MockScript script);

  BackendCapabilities capabilities() const override;
  std::string model_id() const override { return script_.model; }
  Completion complete(const std::string& prompt,
                      const GenerationParams& params) override;
  std::vector<TokenLogProb> score_tokens(const std::string& text) override;
  bool deterministic() const override { return true; }

  const MockScript& script() const { return script_; }

 private:
  MockScript script_;
};

// ---- remote HTTP backend ----

// Completions-style endpoint: POST <base>/v1/completions with prompt,
// sampling params and optional logprobs+echo for teacher-forced scoring.
struct HttpBackendConfig {
  std::string endpoint;  // e.g. http://localhost:8000
  std::string model;
  std::string api_key_env;  // key itself only ever read from the environment
  int max_attempts = 5;
  int backoff_initial_ms = 1000;  // doubled per attempt, jittered
  int timeout_s = 120;
};

class HttpBackend : public ModelBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  BackendCapabilities capabilities() const override;
  std::string model_id() const override { return config_.model; }
  Completion complete(const std::string& prompt,
                      const GenerationParams& params) override;
  std::vector<TokenLogProb> score_tokens(const std::string& text) override;

  // Transport-level journal sink; one record per attempt.
  void set_attempt_journal(std::shared_ptr<class Journal> journal);

 private:
  nlohmann::json post_with_retries(const nlohmann::json& body);

  HttpBackendConfig config_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---- journaling and replay ----

// Append-only JSONL sink, one JSON object per line. Thread-safe.
class Journal {
 public:
  explicit Journal(std::filesystem::path path, bool deterministic_timestamps);
  void append(nlohmann::json record);  // adds "timestamp" if absent
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  bool deterministic_;
  std::mutex mu_;
};

// Records every logical call of an inner backend into a journal.
class JournalingBackend : public ModelBackend {
 public:
  JournalingBackend(std::shared_ptr<ModelBackend> inner,
                    std::shared_ptr<Journal> journal);

  BackendCapabilities capabilities() const override;
  std::string model_id() const override;
  Completion complete(const std::string& prompt,
                      const GenerationParams& params) override;
  std::vector<TokenLogProb> score_tokens(const std::string& text) override;
  bool deterministic() const override;

 private:
  std::shared_ptr<ModelBackend> inner_;
  std::shared_ptr<Journal> journal_;
};

// Serves recorded responses; requests not present in the journal fail with
// a protocol error. Matching is exact on the serialized request, FIFO among
// duplicates.
class ReplayBackend : public ModelBackend {
 public:
  ReplayBackend(const std::filesystem::path& journal_path, std::string model);

  BackendCapabilities capabilities() const override;
  std::string model_id() const override { return model_; }
  Completion complete(const std::string& prompt,
                      const GenerationParams& params) override;
  std::vector<TokenLogProb> score_tokens(const std::string& text) override;
  bool deterministic() const override { return true; }

 private:
  nlohmann::json take(const std::string& kind, const nlohmann::json& request);

  std::string model_;
  std::map<std::string, std::vector<nlohmann::json>> records_;
  std::map<std::string, size_t> cursor_;
  std::mutex mu_;
};

// Factory over the RunConfig backend spec: {"type":"http",...} or
// {"type":"mock",...}.
std::shared_ptr<ModelBackend> make_backend(const nlohmann::json& spec);

nlohmann::json generation_params_to_json(const GenerationParams& params);

}  // namespace contamkit
