// Copyright 2026 The fslsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>
#include <numeric>

#include "fsl/error.hpp"
#include "fsl/har_dataset.hpp"

namespace fsl {

std::string_view to_string(PartitionScheme s) {
  return s == PartitionScheme::IidEqual ? "iid" : "by-subject";
}

PartitionScheme parse_partition_scheme(std::string_view text) {
  if (text == "iid" || text == "iid-equal") return PartitionScheme::IidEqual;
  if (text == "by-subject") return PartitionScheme::BySubject;
  throw ConfigError("unknown partition scheme '" + std::string(text) + "' (expected iid|by-subject)");
}

std::vector<std::vector<std::size_t>> partition_indices(const HarDataset& data, std::size_t clients,
                                                        PartitionScheme scheme, Rng& rng) {
  if (clients == 0) throw ConfigError("partition needs at least one client");
  std::vector<std::vector<std::size_t>> out(clients);
  if (scheme == PartitionScheme::IidEqual) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i) out[i % clients].push_back(order[i]);
    return out;
  }
  const auto subjects = data.distinct_subjects();
  if (clients > subjects.size()) {
    throw ConfigError("by-subject partition: " + std::to_string(clients) + " clients but only " +
                      std::to_string(subjects.size()) + " subjects");
  }
  std::map<int, std::size_t> owner;
  for (std::size_t j = 0; j < subjects.size(); ++j) owner[subjects[j]] = j % clients;
  for (std::size_t i = 0; i < data.size(); ++i) out[owner[data.subject_ids[i]]].push_back(i);
  return out;
}

std::vector<HarDataset> partition(const HarDataset& data, std::size_t clients, PartitionScheme scheme, Rng& rng) {
  std::vector<HarDataset> out;
  for (const auto& idx : partition_indices(data, clients, scheme, rng)) out.push_back(data.subset(idx));
  return out;
}

}  // namespace fsl
