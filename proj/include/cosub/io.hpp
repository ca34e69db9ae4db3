#pragma once

#include <string>
#include <vector>

#include "cosub/data.hpp"

namespace cosub {

enum class NetworkFormat { Dense, EdgeList };

// Loads and validates a dataset from a choices CSV (header agency_id,n_1,...,n_V)
// and a networks CSV, either dense (header agency_id,e_1,...,e_L in pair_index
// order) or an edge list (header agency_id,v,u with 1-based v>u; a sentinel row
// agency_id,0,0 declares an agency with no edges). Agencies are matched by id
// across both files; the output keeps the choices-file order.
Dataset load_dataset(const std::string& choices_path, const std::string& networks_path,
                     NetworkFormat format = NetworkFormat::Dense);

void write_choices_csv(const std::string& path, const Dataset& data);
void write_networks_csv(const std::string& path, const Dataset& data);

// Raw co-subscription counts: a pair-counts CSV (header agency_id,v,u,c_vu)
// and a product-counts CSV (header agency_id,v,m_v). Pairs missing from the
// file count as zero; every (agency, product) must appear in the product file.
struct LabeledCosubCounts {
  std::string agency_id;
  CosubCounts counts;
};
std::vector<LabeledCosubCounts> load_cosub_counts(const std::string& pairs_path,
                                                  const std::string& products_path,
                                                  int v_count);

}  // namespace cosub
