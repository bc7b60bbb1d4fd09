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

#include "backend.hpp"

#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "rng.hpp"
#include "text.hpp"

namespace contamkit {

using nlohmann::json;

Completion ModelBackend::complete(const std::string&, const GenerationParams&) {
  throw Error(ErrorCode::Capability,
              "backend '" + model_id() + "' does not support completion");
}

std::vector<TokenLogProb> ModelBackend::score_tokens(const std::string&) {
  throw Error(ErrorCode::Capability,
              "backend '" + model_id() + "' does not support token scoring");
}

double total_logprob(const std::vector<TokenLogProb>& tokens) {
  double sum = 0.0;
  for (const auto& t : tokens) {
    if (t.logprob) sum += *t.logprob;
  }
  return sum;
}

json generation_params_to_json(const GenerationParams& params) {
  return json{{"temperature", params.temperature},
              {"top_p", params.top_p},
              {"max_tokens", params.max_tokens},
              {"stop", params.stop_sequences}};
}

// ---- MockScript ----

namespace {

MockScript::CompletionMode completion_mode_from_string(const std::string& s) {
  using M = MockScript::CompletionMode;
  if (s == "echo-suffix") return M::EchoSuffix;
  if (s == "fixed-choice") return M::FixedChoice;
  if (s == "seeded-uniform-choice") return M::SeededUniformChoice;
  if (s == "canned-completions") return M::Canned;
  if (s == "fixed-text") return M::FixedText;
  if (s == "perturb-options") return M::PerturbOptions;
  if (s == "none") return M::None;
  throw Error(ErrorCode::Parse, "unknown mock completion mode: " + s);
}

MockScript::ScoringMode scoring_mode_from_string(const std::string& s) {
  using M = MockScript::ScoringMode;
  if (s == "scripted-logprobs") return M::Table;
  if (s == "hash") return M::Hash;
  if (s == "none") return M::None;
  throw Error(ErrorCode::Parse, "unknown mock scoring mode: " + s);
}


std::vector<std::optional<double>> parse_logprob_row(const json& row) {
  std::vector<std::optional<double>> out;
  for (const auto& v : row) {
    out.push_back(v.is_null() ? std::optional<double>() : v.get<double>());
  }
  return out;
}

void apply_completion_spec(MockScript& script, const json& c) {
  script.completion_mode = completion_mode_from_string(c.value("mode", "none"));
  if (c.contains("marker")) script.echo_marker = c["marker"].get<std::string>();
  if (c.contains("guard")) script.echo_guard = c["guard"].get<std::string>();
  if (c.contains("fallback"))
    script.echo_fallback = c["fallback"].get<std::string>();
  if (c.contains("references")) {
    for (const auto& r : c["references"]) {
      script.references.push_back(collapse_whitespace(r.get<std::string>()));
    }
  }
  if (c.contains("letter")) {
    std::string l = c["letter"].get<std::string>();
    if (l.size() != 1) throw Error(ErrorCode::Parse, "mock letter must be one char");
    script.fixed_letter = l[0];
  }
  if (c.contains("letters")) script.letters = c["letters"].get<std::string>();
  if (c.contains("answer_prefix"))
    script.answer_prefix = c["answer_prefix"].get<std::string>();
  if (c.contains("table")) {
    for (auto& [k, v] : c["table"].items()) {
      script.canned[collapse_whitespace(k)] = v.get<std::string>();
    }
  }
  if (c.contains("default"))
    script.canned_default = c["default"].get<std::string>();
  if (c.contains("text")) script.fixed_text = c["text"].get<std::string>();
}

void apply_scoring_spec(MockScript& script, const json& s) {
  script.scoring_mode = scoring_mode_from_string(s.value("mode", "none"));
  if (s.contains("table")) {
    // replaces canned table when the spec is scoring-only shorthand
  }
  if (s.contains("noise")) script.hash_noise = s["noise"].get<double>();
  if (s.contains("ordered_bonus"))
    script.ordered_bonus = s["ordered_bonus"].get<double>();
  if (s.contains("order_table")) {
    for (const auto& t : s["order_table"]) {
      script.order_table.push_back(collapse_whitespace(t.get<std::string>()));
    }
  }
}

}  // namespace

MockScript MockScript::from_json(const json& spec) {
  MockScript script;
  script.seed = spec.value("seed", 0ULL);
  script.model = spec.value("model", "mock");
  script.chat = spec.value("chat", false);
  if (spec.contains("completion") && !spec["completion"].is_null()) {
    apply_completion_spec(script, spec["completion"]);
  }
  if (spec.contains("scoring") && !spec["scoring"].is_null()) {
    const json& s = spec["scoring"];
    apply_scoring_spec(script, s);
    if (s.contains("table")) {
      script.logprob_table.clear();
      for (auto& [k, v] : s["table"].items()) {
        script.logprob_table[collapse_whitespace(k)] = parse_logprob_row(v);
      }
    }
  }
  // single-mode shorthand
  if (spec.contains("mode")) {
    std::string mode = spec["mode"].get<std::string>();
    if (mode == "scripted-logprobs") {
      script.scoring_mode = ScoringMode::Table;
      if (spec.contains("table")) {
        for (auto& [k, v] : spec["table"].items()) {
          script.logprob_table[collapse_whitespace(k)] = parse_logprob_row(v);
        }
      }
    } else {
      apply_completion_spec(script, spec);
    }
  }
  return script;
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

BackendCapabilities MockBackend::capabilities() const {
  BackendCapabilities caps;
  caps.supports_completion =
      script_.completion_mode != MockScript::CompletionMode::None;
  caps.supports_chat = script_.chat;
  caps.supports_token_scoring =
      script_.scoring_mode != MockScript::ScoringMode::None;
  return caps;
}

namespace {

// Longest whole-word prefix of `reference` that the prompt ends with; returns
// the remaining suffix, or nullopt when no prefix matches.
std::optional<std::string> complete_from_reference(const std::string& prompt,
                                                   const std::string& reference) {
  std::optional<std::string> best;
  for (size_t i = 0; i + 1 < reference.size(); ++i) {
    if (reference[i] != ' ') continue;
    std::string_view prefix(reference.data(), i);
    if (prompt.size() >= prefix.size() &&
        prompt.compare(prompt.size() - prefix.size(), prefix.size(), prefix) == 0) {
      best = reference.substr(i + 1);
    }
  }
  return best;
}

std::string letter_answer(const std::string& prefix, char letter) {
  return prefix + " (" + std::string(1, letter) + ")";
}

std::string perturb_options_for(const std::string& prompt) {
  // Pull the quiz source text out of the generator prompt.
  const std::string open_tag = "Input Text:\n";
  size_t begin = prompt.find(open_tag);
  if (begin == std::string::npos) {
    throw Error(ErrorCode::Protocol,
                "perturb-options mock: prompt has no Input Text block");
  }
  begin += open_tag.size();
  size_t end = prompt.find("\n---", begin);
  std::string original = prompt.substr(
      begin, end == std::string::npos ? std::string::npos : end - begin);

  std::vector<std::string> words = whitespace_tokens(original);
  std::vector<size_t> eligible;  // lowercase alphabetic words only
  for (size_t i = 0; i < words.size(); ++i) {
    bool ok = !words[i].empty();
    for (unsigned char c : words[i]) {
      if (!std::islower(c)) {
        ok = false;
        break;
      }
    }
    if (ok) eligible.push_back(i);
  }
  static const char* kSuffixes[4] = {"ish", "esque", "like", "oid"};
  std::string out;
  for (int opt = 0; opt < 4; ++opt) {
    std::vector<std::string> variant = words;
    if (!eligible.empty()) {
      size_t at = eligible[static_cast<size_t>(opt) % eligible.size()];
      variant[at] += kSuffixes[opt];
    } else if (!variant.empty()) {
      variant.back() += kSuffixes[opt];
    }
    std::string text;
    for (const auto& w : variant) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    out += "Option " + std::to_string(opt + 1) + " - " + text + "\n\n";
  }
  return out;
}

}  // namespace

Completion MockBackend::complete(const std::string& prompt,
                                 const GenerationParams& params) {
  (void)params;
  if (prompt.empty()) throw Error(ErrorCode::Argument, "empty prompt");
  using M = MockScript::CompletionMode;
  switch (script_.completion_mode) {
    case M::None:
      return ModelBackend::complete(prompt, params);  // capability error
    case M::EchoSuffix: {
      size_t pos = prompt.rfind(script_.echo_marker);
      if (pos != std::string::npos) {
        return {prompt.substr(pos + script_.echo_marker.size()), "stop"};
      }
      if (!script_.echo_guard.empty() &&
          prompt.find(script_.echo_guard) == std::string::npos) {
        return {script_.echo_fallback, "stop"};
      }
      for (const auto& ref : script_.references) {
        if (auto suffix = complete_from_reference(prompt, ref)) {
          return {*suffix, "stop"};
        }
      }
      return {script_.echo_fallback, "stop"};
    }
    case M::FixedChoice:
      return {letter_answer(script_.answer_prefix, script_.fixed_letter), "stop"};
    case M::SeededUniformChoice: {
      if (script_.letters.empty()) {
        throw Error(ErrorCode::Argument, "uniform-choice mock has no letters");
      }
      Rng rng(derive_seed(script_.seed, fnv1a64(prompt)));
      char letter = script_.letters[rng.uniform(script_.letters.size())];
      return {letter_answer(script_.answer_prefix, letter), "stop"};
    }
    case M::Canned: {
      auto it = script_.canned.find(collapse_whitespace(prompt));
      if (it != script_.canned.end()) return {it->second, "stop"};
      if (script_.canned_default) return {*script_.canned_default, "stop"};
      throw Error(ErrorCode::Protocol, "canned-miss: prompt not in script");
    }
    case M::FixedText:
      return {script_.fixed_text, "stop"};
    case M::PerturbOptions:
      return {perturb_options_for(prompt), "stop"};
  }
  throw Error(ErrorCode::Internal, "unreachable mock completion mode");
}

std::vector<TokenLogProb> MockBackend::score_tokens(const std::string& text) {
  if (text.empty()) throw Error(ErrorCode::Argument, "empty text");
  using M = MockScript::ScoringMode;
  switch (script_.scoring_mode) {
    case M::None:
      return ModelBackend::score_tokens(text);  // capability error
    case M::Table: {
      auto it = script_.logprob_table.find(collapse_whitespace(text));
      if (it == script_.logprob_table.end()) {
        throw Error(ErrorCode::Protocol, "no scripted logprobs for text");
      }
      std::vector<std::string> words = whitespace_tokens(text);
      std::vector<TokenLogProb> out;
      out.reserve(it->second.size());
      for (size_t i = 0; i < it->second.size(); ++i) {
        TokenLogProb t;
        t.token_text = i < words.size() ? words[i] : "tok" + std::to_string(i);
        t.logprob = it->second[i];
        t.position = static_cast<int>(i);
        out.push_back(std::move(t));
      }
      return out;
    }
    case M::Hash: {
      std::string collapsed = collapse_whitespace(text);
      std::vector<std::string> words = whitespace_tokens(collapsed);
      const size_t n = words.size();
      if (n == 0) throw Error(ErrorCode::DegenerateInput, "no scorable tokens");

      // base surprisal is a pure function of the token string
      std::vector<double> lp(n);
      for (size_t i = 0; i < n; ++i) {
        Rng token_rng(derive_seed(script_.seed, fnv1a64(words[i])));
        lp[i] = -(0.5 + 2.0 * token_rng.uniform_real());
      }
      // whole-text jitter makes distinct orderings score independently
      Rng text_rng(derive_seed(script_.seed ^ 0x5ca1ab1eULL, fnv1a64(collapsed)));
      double extra = text_rng.normal(0.0, script_.hash_noise);

      if (script_.ordered_bonus != 0.0 && !script_.order_table.empty()) {
        std::vector<std::pair<size_t, size_t>> found;  // (pos, table index)
        for (size_t i = 0; i < script_.order_table.size(); ++i) {
          size_t pos = collapsed.find(script_.order_table[i]);
          if (pos != std::string::npos) found.emplace_back(pos, i);
        }
        std::sort(found.begin(), found.end());
        bool ascending = !found.empty();
        for (size_t i = 1; i < found.size(); ++i) {
          if (found[i].second <= found[i - 1].second) {
            ascending = false;
            break;
          }
        }
        if (ascending) extra += script_.ordered_bonus;
      }

      std::vector<TokenLogProb> out;
      out.reserve(n);
      for (size_t i = 0; i < n; ++i) {
        TokenLogProb t;
        t.token_text = words[i];
        t.logprob = std::min(0.0, lp[i] + extra / static_cast<double>(n));
        t.position = static_cast<int>(i);
        out.push_back(std::move(t));
      }
      return out;
    }
  }
  throw Error(ErrorCode::Internal, "unreachable mock scoring mode");
}

// ---- HttpBackend ----

struct HttpBackend::Impl {
  std::unique_ptr<httplib::Client> client;
  std::string api_key;
  std::shared_ptr<Journal> journal;
  std::mutex backoff_mu;
  Rng backoff_rng{0};

  explicit Impl(const HttpBackendConfig& config)
      : backoff_rng(fnv1a64(config.endpoint)) {
    client = std::make_unique<httplib::Client>(config.endpoint);
    client->set_connection_timeout(config.timeout_s);
    client->set_read_timeout(config.timeout_s);
    if (!config.api_key_env.empty()) {
      if (const char* key = std::getenv(config.api_key_env.c_str())) {
        api_key = key;
      }
    }
  }
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::Argument, "http backend needs an endpoint URL");
  }
}

HttpBackend::~HttpBackend() = default;

BackendCapabilities HttpBackend::capabilities() const {
  return {.supports_completion = true,
          .supports_chat = false,
          .supports_token_scoring = true};
}

void HttpBackend::set_attempt_journal(std::shared_ptr<Journal> journal) {
  impl_->journal = std::move(journal);
}

json HttpBackend::post_with_retries(const json& body) {
  // Serialized once: every retry sends a byte-identical payload.
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!impl_->api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->api_key);
  }
  std::string last_failure = "unreachable";
  bool rate_limited = false;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      double jitter;
      {
        std::lock_guard<std::mutex> lock(impl_->backoff_mu);
        jitter = 0.5 + impl_->backoff_rng.uniform_real();
      }
      auto delay = static_cast<int64_t>(config_.backoff_initial_ms *
                                        (1 << (attempt - 2)) * jitter);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    auto res = impl_->client->Post("/v1/completions", headers, payload,
                                   "application/json");
    if (impl_->journal) {
      json record{{"kind", "http-attempt"},
                  {"attempt", attempt},
                  {"request", body},
                  {"response", res ? json{{"status", res->status},
                                          {"body", res->body}}
                                   : json{{"error", httplib::to_string(res.error())}}}};
      impl_->journal->append(std::move(record));
    }
    if (!res) {
      last_failure = httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      rate_limited = res->status == 429;
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::Protocol,
                  "endpoint returned HTTP " + std::to_string(res->status) + ": " +
                      res->body);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Protocol,
                  std::string("endpoint returned invalid JSON: ") + e.what());
    }
  }
  throw Error(rate_limited ? ErrorCode::RateLimit : ErrorCode::Transport,
              "endpoint unreachable after " + std::to_string(config_.max_attempts) +
                  " attempts (" + last_failure + ")");
}

Completion HttpBackend::complete(const std::string& prompt,
                                 const GenerationParams& params) {
  if (prompt.empty()) throw Error(ErrorCode::Argument, "empty prompt");
  json body{{"model", config_.model},
            {"prompt", prompt},
            {"max_tokens", params.max_tokens},
            {"temperature", params.temperature},
            {"top_p", params.top_p}};
  if (!params.stop_sequences.empty()) body["stop"] = params.stop_sequences;
  json response = post_with_retries(body);
  try {
    const json& choice = response.at("choices").at(0);
    return {choice.at("text").get<std::string>(),
            choice.value("finish_reason", "stop")};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Protocol,
                std::string("malformed completion response: ") + e.what());
  }
}

std::vector<TokenLogProb> HttpBackend::score_tokens(const std::string& text) {
  if (text.empty()) throw Error(ErrorCode::Argument, "empty text");
  json body{{"model", config_.model},
            {"prompt", text},
            {"max_tokens", 0},
            {"temperature", 0.0},
            {"echo", true},
            {"logprobs", 0}};
  json response = post_with_retries(body);
  try {
    const json& lp = response.at("choices").at(0).at("logprobs");
    const json& tokens = lp.at("tokens");
    const json& probs = lp.at("token_logprobs");
    if (tokens.size() != probs.size()) {
      throw Error(ErrorCode::Protocol, "tokens/token_logprobs length mismatch");
    }
    if (tokens.empty()) {
      throw Error(ErrorCode::Protocol, "endpoint returned no tokens");
    }
    std::vector<TokenLogProb> out;
    std::string concat;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
      TokenLogProb t;
      t.token_text = tokens[i].get<std::string>();
      concat += t.token_text;
      if (!probs[i].is_null()) t.logprob = probs[i].get<double>();
      t.position = static_cast<int>(i);
      out.push_back(std::move(t));
    }
    if (collapse_whitespace(concat) != collapse_whitespace(text)) {
      throw Error(ErrorCode::Protocol,
                  "echoed tokens do not reconstruct the scored text");
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Protocol,
                std::string("malformed logprobs response: ") + e.what());
  }
}

// ---- Journal / replay ----

namespace {

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

}  // namespace

Journal::Journal(std::filesystem::path path, bool deterministic_timestamps)
    : path_(std::move(path)), deterministic_(deterministic_timestamps) {
  std::filesystem::create_directories(path_.parent_path());
}

void Journal::append(json record) {
  if (!record.contains("timestamp")) {
    record["timestamp"] = deterministic_ ? "" : iso_now();
  }
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(ErrorCode::Io, "cannot write journal: " + path_.string());
  out << record.dump() << "\n";
}

JournalingBackend::JournalingBackend(std::shared_ptr<ModelBackend> inner,
                                     std::shared_ptr<Journal> journal)
    : inner_(std::move(inner)), journal_(std::move(journal)) {
  if (auto* http = dynamic_cast<HttpBackend*>(inner_.get())) {
    http->set_attempt_journal(journal_);
  }
}

BackendCapabilities JournalingBackend::capabilities() const {
  return inner_->capabilities();
}

std::string JournalingBackend::model_id() const { return inner_->model_id(); }

bool JournalingBackend::deterministic() const { return inner_->deterministic(); }

Completion JournalingBackend::complete(const std::string& prompt,
                                       const GenerationParams& params) {
  Completion completion = inner_->complete(prompt, params);
  journal_->append(
      json{{"kind", "complete"},
           {"attempt", 1},
           {"request",
            json{{"prompt", prompt}, {"params", generation_params_to_json(params)}}},
           {"response", json{{"text", completion.text},
                             {"finish_reason", completion.finish_reason}}}});
  return completion;
}

std::vector<TokenLogProb> JournalingBackend::score_tokens(const std::string& text) {
  std::vector<TokenLogProb> tokens = inner_->score_tokens(text);
  json toks = json::array();
  for (const auto& t : tokens) {
    toks.push_back(json{{"token", t.token_text},
                        {"logprob", t.logprob ? json(*t.logprob) : json(nullptr)},
                        {"position", t.position}});
  }
  journal_->append(json{{"kind", "score"},
                        {"attempt", 1},
                        {"request", json{{"text", text}}},
                        {"response", json{{"tokens", std::move(toks)}}}});
  return tokens;
}

ReplayBackend::ReplayBackend(const std::filesystem::path& journal_path,
                             std::string model)
    : model_(std::move(model)) {
  std::ifstream in(journal_path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open journal: " + journal_path.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record = json::parse(line);
    std::string kind = record.value("kind", "");
    if (kind != "complete" && kind != "score") continue;
    std::string key = kind + "\x1f" + record.at("request").dump();
    records_[key].push_back(record.at("response"));
  }
}

BackendCapabilities ReplayBackend::capabilities() const {
  return {.supports_completion = true,
          .supports_chat = false,
          .supports_token_scoring = true};
}

json ReplayBackend::take(const std::string& kind, const json& request) {
  std::string key = kind + "\x1f" + request.dump();
  std::lock_guard<std::mutex> lock(mu_);
  auto it = records_.find(key);
  size_t& cur = cursor_[key];
  if (it == records_.end() || cur >= it->second.size()) {
    throw Error(ErrorCode::Protocol, "journal has no recorded response for " +
                                         kind + " request");
  }
  return it->second[cur++];
}

Completion ReplayBackend::complete(const std::string& prompt,
                                   const GenerationParams& params) {
  json response = take(
      "complete",
      json{{"prompt", prompt}, {"params", generation_params_to_json(params)}});
  return {response.at("text").get<std::string>(),
          response.value("finish_reason", "stop")};
}

std::vector<TokenLogProb> ReplayBackend::score_tokens(const std::string& text) {
  json response = take("score", json{{"text", text}});
  std::vector<TokenLogProb> out;
  for (const auto& t : response.at("tokens")) {
    TokenLogProb tok;
    tok.token_text = t.at("token").get<std::string>();
    if (!t.at("logprob").is_null()) tok.logprob = t["logprob"].get<double>();
    tok.position = t.at("position").get<int>();
    out.push_back(std::move(tok));
  }
  return out;
}

std::shared_ptr<ModelBackend> make_backend(const json& spec) {
  std::string type = spec.value("type", "mock");
  if (type == "mock") {
    return std::make_shared<MockBackend>(MockScript::from_json(spec));
  }
  if (type == "http") {
    if (!spec.contains("endpoint")) {
      throw Error(ErrorCode::Parse, "http backend spec needs an endpoint");
    }
    HttpBackendConfig config;
    config.endpoint = spec["endpoint"].get<std::string>();
    config.model = spec.value("model", "");
    config.api_key_env = spec.value("api_key_env", "");
    config.max_attempts = spec.value("max_attempts", 5);
    config.backoff_initial_ms = spec.value("backoff_initial_ms", 1000);
    config.timeout_s = spec.value("timeout_s", 120);
    return std::make_shared<HttpBackend>(std::move(config));
  }
  throw Error(ErrorCode::Parse, "unknown backend type: " + type);
}

}  // namespace contamkit
