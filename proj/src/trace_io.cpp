#include "cosub/trace_io.hpp"

#include <fstream>

#include <json.hpp>

namespace cosub {

using nlohmann::json;

std::string trace_record_to_json(const TraceRecord& rec) {
  json doc;
  doc["iteration"] = rec.iteration;
  doc["C"] = rec.C;
  doc["G"] = rec.G;
  doc["p"] = rec.p;
  doc["nu"] = rec.nu;
  doc["Z"] = rec.Z;
  json xbar = json::array();
  for (const auto& m : rec.Xbar) {
    json rows = json::array();
    for (Eigen::Index v = 0; v < m.rows(); ++v) {
      json row = json::array();
      for (Eigen::Index r = 0; r < m.cols(); ++r) row.push_back(m(v, r));
      rows.push_back(std::move(row));
    }
    xbar.push_back(std::move(rows));
  }
  doc["Xbar"] = std::move(xbar);
  doc["theta"] = rec.theta;
  doc["log_joint"] = rec.log_joint;
  return doc.dump();
}

TraceRecord trace_record_from_json(const std::string& line, int expected_n) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& err) {
    throw ParseError(std::string("trace record: ") + err.what());
  }
  TraceRecord rec;
  try {
    rec.iteration = doc.at("iteration").get<int>();
    rec.C = doc.at("C").get<std::vector<int>>();
    rec.G = doc.at("G").get<std::vector<int>>();
    rec.p = doc.at("p").get<std::vector<std::vector<double>>>();
    rec.nu = doc.at("nu").get<std::vector<std::vector<double>>>();
    rec.Z = doc.at("Z").get<std::vector<double>>();
    const auto xbar = doc.at("Xbar").get<std::vector<std::vector<std::vector<double>>>>();
    for (const auto& rows : xbar) {
      Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t v = 0; v < rows.size(); ++v) {
        for (std::size_t r = 0; r < rows[v].size(); ++r) m(v, r) = rows[v][r];
      }
      rec.Xbar.push_back(std::move(m));
    }
    rec.theta = doc.at("theta").get<std::vector<std::vector<double>>>();
    rec.log_joint = doc.at("log_joint").get<double>();
  } catch (const json::exception& err) {
    throw ParseError(std::string("trace record: ") + err.what());
  }
  if (expected_n > 0 && static_cast<int>(rec.C.size()) != expected_n) {
    throw ParseError("trace record: partition length does not match the dataset");
  }
  return rec;
}

void for_each_trace_record(const std::string& path,
                           const std::function<void(const TraceRecord&)>& visit) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    visit(trace_record_from_json(line, 0));
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace cosub
