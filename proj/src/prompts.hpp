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

#include <map>
#include <string>

namespace contamkit::prompts {

// Published template texts. The same texts are bundled under prompts/ as
// plain files; a test keeps the two in sync byte for byte.
const std::string& perturbation();    // placeholder: {instance}
const std::string& standard_quiz();   // [split], [dataset], {choices["(A)"]}..{choices["(E)"]}
const std::string& local_order_quiz();  // [Description of dataset], [split], [dataset name], [tar example], [options]
const std::string& overlap_judge();   // {reference_text}, {candidate_text}

// Toolkit-defined prompts.
const std::string& guided_completion();   // {dataset}, {split}, {prefix}
const std::string& general_completion();  // {prefix}
const std::string& cot_solution();        // {question}

// Literal substring substitution of every (placeholder, value) pair.
std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& values);

}  // namespace contamkit::prompts
