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

#include "prompts.hpp"

namespace contamkit::prompts {

namespace {

const std::string kPerturbation =
    R"PT(Instruction: Your task is to create a four-choice quiz by replacing the words in the provided "Input Text" with their contextually relevant synonyms. The meaning and overall structure of the four options must exactly match every detail and the structure in the Input Text. You must not include the provided Input Text as an option. Each option in the four-question quiz you generate must include both the underlying text and answer choices in the Input Text but with word-level perturbations.
You must make sure that:

(1) You generate distinct options based on the provided Input Text;
(2) The only difference between options is word-level perturbations.
(3) Each Option must still include the main part of the text in the Input Text with word level perturbations
(4) Each option must still include all answer choices present in the Input Text with no changes
(5) No numbers or proper nouns are changed.
(6) Options are ordered;
(7) There is not any extra explanation;
(8) You comply with the following "Format" to generate options
(9) You comply with every specific symbol and letter detail in the given Input Text; and
(10) All options retain the exact label from the Input Text, if there is one.
---
Input Text:
{instance}
---
Format:
Option 1 -

Option 2 -

Option 3 -

Option 4 -
)PT";

const std::string kStandardQuiz =
    R"PT(Instruction: You are provided with a five-choice quiz. Your task is to correctly select the option that exactly corresponds to an instance from the [split] split of the [dataset] dataset.

When selecting the option, you must ensure that you follow the following rules:
(1) You must ensure that you only generate a single option letter as your answer.
(2) If you do not know the dataset or the correct answer, you must select option "(E) None of the provided options."
(3) You must output the answer in your final sentence like "The correct answer is ..."

Hint: While all the following options seem similar in terms of meaning, there is only one option that reflects the exact wording with respect to the original instance.
---
(A) {choices["(A)"]}
(B) {choices["(B)"]}
(C) {choices["(C)"]}
(D) {choices["(D)"]}
(E) {choices["(E)"]}
---
Answer:)PT";

const std::string kLocalOrderQuiz =
    R"PT([Description of dataset]

Given the target data example in the [split] of the [dataset name] dataset, Which of the following examples was next to it in the original order of the dataset? Exactly one of the choices must be selected and you need to output the answer in your final sentence like "The answer is ..."

Target example: [tar example]

Options: [options])PT";

const std::string kOverlapJudge =
    R"PT(INSTRUCTION:
You are provided with a reference text and a candidate text.
The candidate text is a generated replica of the reference text.
Your task is to determine if the candidate text is an exact or near-exact match of the reference text.
Near-exact match candidates must PRECISELY match the reference candidates in terms of sentence structure, overlap, and contextual similarity.
Respond only with 'Yes' or 'No'.

Example 1:

REFERENCE TEXT:
The cat waited at the top.

CANDIDATE TEXT:
The cat waited at the top.

ANSWER: Yes (exact match)

Example 2:

REFERENCE TEXT:
icy surface of Jupiter's largest moon, Ganymede. These irregular masses may be rock formations, supported by Ganymede's icy shell for billions of years.

CANDIDATE TEXT:
icy surface of Jupiter's largest moon, Ganymede. These irregular masses may be rock formations, supported by Ganymede's icy shell for billions of years. This discovery supports the theory that Ganymede has a subsurface ocean. Scientists used gravity data from NASA's Galileo spacecraft to create a geophysical model of the interior of Ganymede.

ANSWER: Yes (near-exact match)

Example 3:

REFERENCE TEXT:
50th Anniversary of Normandy Landings lasts a year.

CANDIDATE TEXT:
The 50th anniversary celebration of the first Normandy landing will last a year.

ANSWER: Yes (near-exact match)

Example 4:

REFERENCE TEXT:
Microsoft's Hotmail has raised its storage capacity to 250MB.

CANDIDATE TEXT:
Microsoft has increased the storage capacity of its Hotmail e-mail service to 250MB.

ANSWER: Yes (near-exact match)

Example 5:

REFERENCE TEXT:
{reference_text}

CANDIDATE TEXT:
{candidate_text}

ANSWER:)PT";

const std::string kGuidedCompletion =
    R"PT(The following is the beginning of an instance from the {split} split of the {dataset} dataset. Continue the instance exactly as it appears in the dataset, without any commentary.

{prefix})PT";

const std::string kGeneralCompletion =
    R"PT(Continue the following text, without any commentary.

{prefix})PT";

const std::string kCotSolution =
    R"PT(Solve the following problem. Reason step by step and state the final answer at the end.

{question})PT";

}  // namespace

const std::string& perturbation() { return kPerturbation; }
const std::string& standard_quiz() { return kStandardQuiz; }
const std::string& local_order_quiz() { return kLocalOrderQuiz; }
const std::string& overlap_judge() { return kOverlapJudge; }
const std::string& guided_completion() { return kGuidedCompletion; }
const std::string& general_completion() { return kGeneralCompletion; }
const std::string& cot_solution() { return kCotSolution; }

std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& values) {
  std::string out = tmpl;
  for (const auto& [key, value] : values) {
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return out;
}

}  // namespace contamkit::prompts
