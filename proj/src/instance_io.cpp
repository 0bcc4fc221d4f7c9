#include "crowdsched/instance_io.hpp"

#include <fstream>
#include <json.hpp>

namespace crowdsched {

using nlohmann::json;

Instance read_instance(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance: ") + e.what(), 0);
  }
  try {
    const auto m = doc.at("m").get<std::size_t>();
    const auto n = doc.at("n").get<std::size_t>();
    auto phi = doc.at("phi").get<std::vector<double>>();
    auto weights = doc.at("weights").get<std::vector<double>>();
    auto rst = doc.at("rst").get<std::vector<std::vector<double>>>();
    if (phi.size() != m) throw ParseError("instance: phi length differs from m", 0);
    if (weights.size() != n) throw ParseError("instance: weights length differs from n", 0);
    return Instance(std::move(phi), std::move(weights), std::move(rst));
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what(), 0);
  }
}

void write_instance(std::ostream& out, const Instance& instance) {
  json doc;
  doc["m"] = instance.workers();
  doc["n"] = instance.tasks();
  doc["phi"] = instance.phis();
  doc["weights"] = instance.weights();
  doc["rst"] = instance.rst_rows();
  out << doc.dump() << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_instance(in);
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_instance(out, instance);
}

}  // namespace crowdsched
