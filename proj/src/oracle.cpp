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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "error.hpp"
#include "prompts.hpp"
#include "rng.hpp"

namespace contamkit {

using nlohmann::json;

std::optional<AugmentedInstance> augment_answer_cot(
    ModelBackend& generator, const DatasetInstance& instance) {
  if (!generator.capabilities().supports_completion) {
    throw Error(ErrorCode::Capability, "generator must support completion");
  }
  std::string prompt = prompts::render(prompts::cot_solution(),
                                       {{"{question}", instance.question}});
  GenerationParams params;
  params.max_tokens = 1024;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string solution = generator.complete(prompt, params).text;
    if (!solution.empty()) {
      return AugmentedInstance{instance, std::move(solution),
                               generator.model_id()};
    }
  }
  return std::nullopt;  // dropped, logged by the caller
}

std::vector<size_t> select_contamination_blocks(size_t dataset_size,
                                                double proportion, int pack_size,
                                                uint64_t seed) {
  if (proportion < 0.0 || proportion > 100.0) {
    throw Error(ErrorCode::Argument, "proportion must be in [0, 100]");
  }
  if (pack_size < 1) {
    throw Error(ErrorCode::Argument, "pack_size must be >= 1");
  }
  const size_t num_blocks = dataset_size / static_cast<size_t>(pack_size);
  const auto target = static_cast<double>(dataset_size) * proportion / 100.0;
  auto want_blocks = static_cast<size_t>(
      std::llround(target / static_cast<double>(pack_size)));
  want_blocks = std::min(want_blocks, num_blocks);
  if (proportion > 0.0 && want_blocks == 0) {
    throw Error(ErrorCode::Argument,
                "proportion rounds to zero instances at this pack size");
  }
  if (want_blocks == 0) return {};
  Rng rng(derive_seed(seed, "oracle-blocks"));
  return rng.sample_indices(num_blocks, want_blocks);
}

namespace {

std::string render_record_text(const std::vector<AugmentedInstance>& members) {
  // pack_size question/solution pairs joined by a blank line
  std::string text;
  for (const auto& m : members) {
    if (!text.empty()) text += "\n\n";
    text += m.source.question + "\n" + m.cot_answer;
  }
  return text;
}

}  // namespace

OracleManifest build_contaminated_set(const Dataset& dataset, double proportion,
                                      int pack_size, ModelBackend& generator,
                                      uint64_t seed,
                                      const std::filesystem::path& out_dir) {
  std::vector<size_t> blocks =
      select_contamination_blocks(dataset.size(), proportion, pack_size, seed);

  OracleManifest manifest;
  manifest.dataset = dataset.meta.name;
  manifest.split = dataset.meta.split;
  manifest.proportion = proportion;
  manifest.pack_size = pack_size;
  manifest.seed = seed;
  manifest.generator_model = generator.model_id();

  std::vector<PackedRecord> records;
  for (size_t block : blocks) {
    PackedRecord record;
    bool failed = false;
    for (int k = 0; k < pack_size; ++k) {
      const auto& inst =
          dataset.instances[block * static_cast<size_t>(pack_size) + k];
      auto augmented = augment_answer_cot(generator, inst);
      if (!augmented) {
        failed = true;
        break;
      }
      record.instances.push_back(std::move(*augmented));
    }
    if (failed) {
      ++manifest.dropped_blocks;  // a partial pack would break local order
      continue;
    }
    record.text = render_record_text(record.instances);
    manifest.included_instances += pack_size;
    records.push_back(std::move(record));
  }
  manifest.records = static_cast<int>(records.size());

  std::filesystem::create_directories(out_dir);
  auto train_path = out_dir / "train.jsonl";
  auto tmp_path = out_dir / "train.jsonl.tmp";
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp_path.string());
    for (const auto& record : records) {
      json obj{{"text", record.text}};
      json ids = json::array();
      json indices = json::array();
      for (const auto& m : record.instances) {
        ids.push_back(m.source.id);
        indices.push_back(m.source.index);
      }
      obj["source_ids"] = std::move(ids);
      obj["source_indices"] = std::move(indices);
      out << obj.dump() << "\n";
    }
  }
  std::filesystem::rename(tmp_path, train_path);  // atomic emission
  manifest.training_file = train_path.string();

  {
    json obj{{"dataset", manifest.dataset},
             {"split", manifest.split},
             {"proportion", manifest.proportion},
             {"pack_size", manifest.pack_size},
             {"learning_rate", manifest.learning_rate},
             {"epochs", manifest.epochs},
             {"seed", manifest.seed},
             {"generator_model", manifest.generator_model},
             {"included_instances", manifest.included_instances},
             {"records", manifest.records},
             {"dropped_blocks", manifest.dropped_blocks},
             {"training_file", manifest.training_file}};
    auto manifest_tmp = out_dir / "manifest.json.tmp";
    std::ofstream out(manifest_tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write manifest");
    out << obj.dump(2) << "\n";
    out.close();
    std::filesystem::rename(manifest_tmp, out_dir / "manifest.json");
  }
  return manifest;
}

}  // namespace contamkit
