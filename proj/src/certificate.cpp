#include "retard_oc/certificate.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace retard_oc {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string location(const CheckResult& c) {
  if (!c.time) return "-";
  std::string out = "t=" + num(*c.time);
  if (!c.point.empty()) {
    out += " x=(";
    for (std::size_t i = 0; i < c.point.size(); ++i) out += (i ? "," : "") + num(c.point[i]);
    out += ")";
  }
  return out;
}

nlohmann::json check_json(const CheckResult& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["worst_residual"] = c.worst_residual;
  j["worst_time"] = c.time ? nlohmann::json(*c.time) : nlohmann::json(nullptr);
  j["worst_point"] = c.point;
  j["detail"] = c.detail;
  return j;
}

}  // namespace

bool Certificate::overall() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const CheckResult* Certificate::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  for (const auto& c : diagnostics)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> Certificate::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

std::string Certificate::to_text() const {
  std::ostringstream os;
  os << "subject: " << subject << "\n";
  os << "overall: " << (overall() ? "PASS" : "FAIL") << "\n";
  os << "seed: " << seed << "\n";
  os << "cost: " << (cost ? num(*cost) : std::string("-")) << "\n";
  for (const auto& [k, v] : tolerances) os << "tolerance." << k << ": " << num(v) << "\n";
  for (const auto& c : checks) {
    os << "check." << c.name << ": " << (c.pass ? "PASS" : "FAIL")
       << " worst=" << num(c.worst_residual) << " at " << location(c);
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  for (const auto& c : diagnostics) {
    os << "diagnostic." << c.name << ": " << (c.pass ? "ok" : "flagged")
       << " worst=" << num(c.worst_residual) << " at " << location(c);
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  return os.str();
}

std::string Certificate::to_json() const {
  nlohmann::json j;
  j["subject"] = subject;
  j["overall"] = overall();
  j["seed"] = seed;
  j["cost"] = cost ? nlohmann::json(*cost) : nlohmann::json(nullptr);
  j["tolerances"] = tolerances;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(check_json(c));
  j["diagnostics"] = nlohmann::json::array();
  for (const auto& c : diagnostics) j["diagnostics"].push_back(check_json(c));
  return j.dump(2) + "\n";
}

}  // namespace retard_oc
