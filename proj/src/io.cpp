#include "cosub/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cosub {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void fail(const std::string& path, int line_no, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw ParseError(msg.str());
}

long long parse_count(const std::string& field, const std::string& path, int line_no) {
  long long value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(path, line_no, "expected an integer, got '" + field + "'");
  }
  return value;
}

struct CsvFile {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line number, fields
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  CsvFile csv{path, {}, {}};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      csv.header = std::move(fields);
    } else {
      csv.rows.emplace_back(line_no, std::move(fields));
    }
  }
  if (csv.header.empty()) throw ParseError(path + ": empty file, expected a CSV header");
  return csv;
}

int header_v_count(const CsvFile& csv, const std::string& prefix) {
  if (csv.header.empty() || csv.header[0] != "agency_id") {
    fail(csv.path, 1, "first header column must be 'agency_id'");
  }
  const int cols = static_cast<int>(csv.header.size()) - 1;
  for (int j = 1; j <= cols; ++j) {
    const std::string expected = prefix + std::to_string(j);
    if (csv.header[j] != expected) {
      fail(csv.path, 1, "header column " + std::to_string(j + 1) + " must be '" + expected +
                            "', got '" + csv.header[j] + "'");
    }
  }
  return cols;
}

}  // namespace

Dataset load_dataset(const std::string& choices_path, const std::string& networks_path,
                     NetworkFormat format) {
  const CsvFile choices = read_csv(choices_path);
  const int V = header_v_count(choices, "n_");
  if (V < 2) fail(choices_path, 1, "need at least two product columns");

  Dataset data;
  data.v_count = V;
  std::map<std::string, int> index_of;
  for (const auto& [line_no, fields] : choices.rows) {
    if (static_cast<int>(fields.size()) != V + 1) {
      fail(choices_path, line_no,
           "expected " + std::to_string(V + 1) + " columns, got " + std::to_string(fields.size()));
    }
    AgencyRecord rec;
    rec.agency_id = fields[0];
    if (rec.agency_id.empty()) fail(choices_path, line_no, "empty agency_id");
    if (index_of.count(rec.agency_id)) {
      fail(choices_path, line_no, "duplicate agency_id '" + rec.agency_id + "'");
    }
    for (int v = 1; v <= V; ++v) {
      const long long c = parse_count(fields[v], choices_path, line_no);
      if (c < 0) fail(choices_path, line_no, "negative count in column n_" + std::to_string(v));
      rec.choice_counts.push_back(c);
    }
    rec.network = EdgeVector(V);
    index_of[rec.agency_id] = data.n();
    data.agencies.push_back(std::move(rec));
  }
  if (data.agencies.empty()) throw ParseError(choices_path + ": no agency rows");

  const CsvFile networks = read_csv(networks_path);
  std::vector<bool> seen(data.agencies.size(), false);

  if (format == NetworkFormat::Dense) {
    const int L = header_v_count(networks, "e_");
    if (L != pair_count(V)) {
      fail(networks_path, 1,
           "expected " + std::to_string(pair_count(V)) + " edge columns for V=" +
               std::to_string(V) + ", got " + std::to_string(L));
    }
    for (const auto& [line_no, fields] : networks.rows) {
      if (static_cast<int>(fields.size()) != L + 1) {
        fail(networks_path, line_no,
             "expected " + std::to_string(L + 1) + " columns, got " +
                 std::to_string(fields.size()));
      }
      auto it = index_of.find(fields[0]);
      if (it == index_of.end()) {
        fail(networks_path, line_no,
             "agency '" + fields[0] + "' does not appear in " + choices_path);
      }
      if (seen[it->second]) fail(networks_path, line_no, "duplicate agency_id '" + fields[0] + "'");
      seen[it->second] = true;
      EdgeVector& edges = data.agencies[it->second].network;
      for (int l = 0; l < L; ++l) {
        const long long bit = parse_count(fields[l + 1], networks_path, line_no);
        if (bit != 0 && bit != 1) {
          fail(networks_path, line_no, "column e_" + std::to_string(l + 1) + " must be 0 or 1");
        }
        edges.bits[l] = static_cast<std::uint8_t>(bit);
      }
    }
  } else {
    if (networks.header != std::vector<std::string>{"agency_id", "v", "u"}) {
      fail(networks_path, 1, "edge-list header must be 'agency_id,v,u'");
    }
    for (const auto& [line_no, fields] : networks.rows) {
      if (fields.size() != 3) fail(networks_path, line_no, "expected 3 columns");
      auto it = index_of.find(fields[0]);
      if (it == index_of.end()) {
        fail(networks_path, line_no,
             "agency '" + fields[0] + "' does not appear in " + choices_path);
      }
      seen[it->second] = true;
      const long long v = parse_count(fields[1], networks_path, line_no);
      const long long u = parse_count(fields[2], networks_path, line_no);
      if (v == 0 && u == 0) continue;  // declares an agency with no edges
      if (u < 1 || v <= u || v > V) {
        fail(networks_path, line_no,
             "invalid pair (" + fields[1] + "," + fields[2] + "): need 1 <= u < v <= V");
      }
      data.agencies[it->second].network.set(static_cast<int>(v), static_cast<int>(u), 1);
    }
  }

  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ParseError(networks_path + ": agency '" + data.agencies[i].agency_id +
                       "' from " + choices_path + " is missing");
    }
  }

  data.validate();
  return data;
}

void write_choices_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "agency_id";
  for (int v = 1; v <= data.v_count; ++v) out << ",n_" << v;
  out << "\n";
  for (const auto& agency : data.agencies) {
    out << agency.agency_id;
    for (long long c : agency.choice_counts) out << ',' << c;
    out << "\n";
  }
}

void write_networks_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "agency_id";
  for (int l = 1; l <= pair_count(data.v_count); ++l) out << ",e_" << l;
  out << "\n";
  for (const auto& agency : data.agencies) {
    out << agency.agency_id;
    for (std::uint8_t bit : agency.network.bits) out << ',' << int(bit);
    out << "\n";
  }
}

std::vector<LabeledCosubCounts> load_cosub_counts(const std::string& pairs_path,
                                                  const std::string& products_path,
                                                  int v_count) {
  const CsvFile products = read_csv(products_path);
  if (products.header != std::vector<std::string>{"agency_id", "v", "m_v"}) {
    fail(products_path, 1, "header must be 'agency_id,v,m_v'");
  }
  std::vector<LabeledCosubCounts> result;
  std::map<std::string, int> index_of;
  for (const auto& [line_no, fields] : products.rows) {
    if (fields.size() != 3) fail(products_path, line_no, "expected 3 columns");
    const long long v = parse_count(fields[1], products_path, line_no);
    const long long m = parse_count(fields[2], products_path, line_no);
    if (v < 1 || v > v_count) fail(products_path, line_no, "product index out of range");
    if (m < 0) fail(products_path, line_no, "negative product count");
    auto it = index_of.find(fields[0]);
    if (it == index_of.end()) {
      LabeledCosubCounts entry;
      entry.agency_id = fields[0];
      entry.counts.v_count = v_count;
      entry.counts.pair_counts.assign(pair_count(v_count), 0);
      entry.counts.product_counts.assign(v_count, -1);
      it = index_of.emplace(fields[0], static_cast<int>(result.size())).first;
      result.push_back(std::move(entry));
    }
    auto& slot = result[it->second].counts.product_counts[v - 1];
    if (slot >= 0) fail(products_path, line_no, "duplicate (agency, product) row");
    slot = m;
  }

  const CsvFile pairs = read_csv(pairs_path);
  if (pairs.header != std::vector<std::string>{"agency_id", "v", "u", "c_vu"}) {
    fail(pairs_path, 1, "header must be 'agency_id,v,u,c_vu'");
  }
  for (const auto& [line_no, fields] : pairs.rows) {
    if (fields.size() != 4) fail(pairs_path, line_no, "expected 4 columns");
    auto it = index_of.find(fields[0]);
    if (it == index_of.end()) {
      fail(pairs_path, line_no,
           "agency '" + fields[0] + "' does not appear in " + products_path);
    }
    const long long v = parse_count(fields[1], pairs_path, line_no);
    const long long u = parse_count(fields[2], pairs_path, line_no);
    const long long c = parse_count(fields[3], pairs_path, line_no);
    if (u < 1 || v <= u || v > v_count) {
      fail(pairs_path, line_no, "invalid pair: need 1 <= u < v <= V");
    }
    if (c < 0) fail(pairs_path, line_no, "negative co-subscription count");
    result[it->second].counts.pair_counts[pair_index(static_cast<int>(v), static_cast<int>(u),
                                                     v_count)] = c;
  }

  for (auto& entry : result) {
    for (int v = 1; v <= v_count; ++v) {
      if (entry.counts.product_counts[v - 1] < 0) {
        throw ParseError(products_path + ": agency '" + entry.agency_id + "' is missing m_v for product " +
                         std::to_string(v));
      }
    }
  }
  return result;
}

}  // namespace cosub
