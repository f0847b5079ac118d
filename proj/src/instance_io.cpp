#include "fairmatch/instance_io.hpp"

#include <fstream>
#include <stdexcept>

namespace fairmatch {

using nlohmann::json;

json instance_to_json(const Instance& inst) {
  json j;
  j["schema_version"] = kInstanceSchemaVersion;
  j["horizon"] = inst.horizon;
  j["arrival_model"] = inst.arrival_model == ArrivalModel::Kiid ? "kiid" : "kad";
  j["groups"] = inst.groups;
  auto group_name = [&](GroupId g) { return inst.groups.at(static_cast<std::size_t>(g)); };

  json offline = json::array();
  for (const auto& u : inst.offline) {
    offline.push_back({{"id", u.id}, {"group", group_name(u.group)}, {"patience", u.patience}});
  }
  j["offline"] = std::move(offline);

  json online = json::array();
  for (const auto& v : inst.online) {
    json o = {{"id", v.id}, {"group", group_name(v.group)}, {"patience", v.patience}};
    if (inst.arrival_model == ArrivalModel::Kiid) {
      o["p"] = v.p;
    } else {
      o["p_t"] = v.p_t;
    }
    if (v.origin >= 0) o["origin"] = v.origin;
    online.push_back(std::move(o));
  }
  j["online"] = std::move(online);

  json edges = json::array();
  for (const auto& e : inst.edges) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"p_e", e.success_prob},
                     {"w_op", e.w_op}, {"w_off", e.w_off}, {"w_on", e.w_on}});
  }
  j["edges"] = std::move(edges);
  j["metadata"] = {{"utility_shift", inst.utility_shift}};
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kInstanceSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version " + std::to_string(version));
    }
    Instance inst;
    inst.horizon = j.at("horizon").get<int>();
    const auto model = j.at("arrival_model").get<std::string>();
    if (model == "kiid") {
      inst.arrival_model = ArrivalModel::Kiid;
    } else if (model == "kad") {
      inst.arrival_model = ArrivalModel::Kad;
    } else {
      throw std::invalid_argument("arrival_model must be \"kiid\" or \"kad\"");
    }
    inst.groups = j.at("groups").get<std::vector<std::string>>();
    auto group_id = [&](const json& g) -> GroupId {
      if (g.is_number_integer()) return g.get<int>();
      const auto name = g.get<std::string>();
      for (std::size_t i = 0; i < inst.groups.size(); ++i) {
        if (inst.groups[i] == name) return static_cast<GroupId>(i);
      }
      throw std::invalid_argument("unknown group \"" + name + "\"");
    };

    for (const auto& o : j.at("offline")) {
      OfflineVertex u;
      u.id = o.at("id").get<int>();
      u.group = group_id(o.at("group"));
      u.patience = o.value("patience", 1);
      inst.offline.push_back(u);
    }
    for (const auto& o : j.at("online")) {
      OnlineType v;
      v.id = o.at("id").get<int>();
      v.group = group_id(o.at("group"));
      v.patience = o.value("patience", 1);
      if (inst.arrival_model == ArrivalModel::Kiid) {
        v.p = o.at("p").get<double>();
      } else {
        v.p_t = o.at("p_t").get<std::vector<double>>();
      }
      v.origin = o.value("origin", -1);
      inst.online.push_back(std::move(v));
    }
    for (const auto& o : j.at("edges")) {
      Edge e;
      e.u = o.at("u").get<int>();
      e.v = o.at("v").get<int>();
      e.success_prob = o.value("p_e", 1.0);
      e.w_op = o.value("w_op", 0.0);
      e.w_off = o.value("w_off", 0.0);
      e.w_on = o.value("w_on", 0.0);
      inst.edges.push_back(e);
    }
    if (j.contains("metadata")) inst.utility_shift = j["metadata"].value("utility_shift", 0.0);
    return inst;
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("instance JSON: ") + ex.what());
  }
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(path.string() + ": " + ex.what());
  }
  return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << instance_to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fairmatch
