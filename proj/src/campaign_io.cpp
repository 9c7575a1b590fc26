#include "tunnelpl/campaign.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tunnelpl/errors.hpp"
#include "tunnelpl/format.hpp"

namespace tunnelpl {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

constexpr const char* kColumnNames[] = {"anchor_pos", "loss_bs1", "loss_bs2", "iteration"};

}  // namespace

void Campaign::validate() const {
  if (!std::isfinite(bs1_pos) || !std::isfinite(bs2_pos) || !(bs2_pos > bs1_pos)) {
    throw ValidationError("campaign header: bs2_pos must be greater than bs1_pos");
  }
  if (units != "m") throw ValidationError("campaign header: unsupported units '" + units + "' (expected m)");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "campaign row " + std::to_string(i + 1) + ": ";
    if (!(r.anchor_pos > bs1_pos && r.anchor_pos < bs2_pos)) {
      throw ValidationError(where + "anchor_pos " + format_double(r.anchor_pos) +
                            " is not strictly between the base stations");
    }
    if (!std::isfinite(r.loss_bs1)) throw ValidationError(where + "loss_bs1 is not finite");
    if (!std::isfinite(r.loss_bs2)) throw ValidationError(where + "loss_bs2 is not finite");
  }
}

Campaign read_campaign(std::istream& in) {
  Campaign c;
  bool have_bs1 = false, have_bs2 = false, have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key == "tunnel") {
        c.tunnel_id = value;
      } else if (key == "bs1_pos" || key == "bs2_pos") {
        double v = 0.0;
        if (!parse_double(value, v)) throw ParseError("line " + std::to_string(line_no) + ": " + key + " is not a number", line_no, key);
        (key == "bs1_pos" ? c.bs1_pos : c.bs2_pos) = v;
        (key == "bs1_pos" ? have_bs1 : have_bs2) = true;
      } else if (key == "units") {
        c.units = value;
      } else {
        c.metadata.emplace_back(key, value);
      }
      continue;
    }
    if (!have_header) {
      std::string normalized;
      for (char ch : t) if (ch != ' ' && ch != '\t') normalized += ch;
      if (normalized != kCampaignColumns) {
        throw ParseError("line " + std::to_string(line_no) + ": expected column header '" + kCampaignColumns + "'", line_no);
      }
      have_header = true;
      continue;
    }

    std::vector<std::string> fields;
    std::istringstream ls(t);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (!t.empty() && t.back() == ',') fields.emplace_back();
    const std::size_t row_no = c.rows.size() + 1;
    const std::string where = "line " + std::to_string(line_no) + " (row " + std::to_string(row_no) + ")";
    if (fields.size() != 4) {
      throw ParseError(where + ": expected 4 columns, found " + std::to_string(fields.size()), line_no);
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      if (!parse_double(fields[k], v[k])) {
        throw ParseError(where + ", column " + kColumnNames[k] + ": '" + trim(fields[k]) + "' is not a number", line_no,
                         kColumnNames[k]);
      }
    }
    if (!(v[3] >= 0.0) || v[3] != std::floor(v[3]) || v[3] > 1e15) {
      throw ParseError(where + ", column iteration: expected a non-negative integer", line_no, "iteration");
    }
    c.rows.push_back({v[0], v[1], v[2], static_cast<std::size_t>(v[3])});
  }
  if (!have_bs1 || !have_bs2) throw ValidationError("campaign header must define bs1_pos and bs2_pos");
  if (!have_header) throw ParseError("missing column header '" + std::string(kCampaignColumns) + "'", line_no);
  c.validate();
  return c;
}

void write_campaign(std::ostream& out, const Campaign& c) {
  out << "# tunnel=" << c.tunnel_id << '\n';
  out << "# bs1_pos=" << format_double(c.bs1_pos) << '\n';
  out << "# bs2_pos=" << format_double(c.bs2_pos) << '\n';
  out << "# units=" << c.units << '\n';
  for (const auto& [k, v] : c.metadata) out << "# " << k << '=' << v << '\n';
  out << kCampaignColumns << '\n';
  for (const auto& r : c.rows) {
    out << format_double(r.anchor_pos) << ',' << format_double(r.loss_bs1) << ',' << format_double(r.loss_bs2) << ','
        << r.iteration << '\n';
  }
}

TunnelGeometry campaign_geometry(const Campaign& c) {
  std::map<double, bool> unique;
  for (const auto& r : c.rows) unique[r.anchor_pos] = true;
  std::vector<double> xs;
  xs.reserve(unique.size());
  for (const auto& [x, _] : unique) xs.push_back(x);
  return TunnelGeometry(c.bs1_pos, c.bs2_pos, std::move(xs));
}

TrainingSet campaign_training_set(const Campaign& c) {
  const TunnelGeometry g = campaign_geometry(c);
  std::map<double, std::size_t> index;
  for (std::size_t i = 0; i < g.anchor_count(); ++i) index[g.anchors()[i]] = i;
  TrainingSet ts;
  for (const auto& r : c.rows) record_engagement(ts, g, index.at(r.anchor_pos), r.loss_bs1, r.loss_bs2, r.iteration);
  return ts;
}

}  // namespace tunnelpl
