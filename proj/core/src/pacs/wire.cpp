#include "iodeep/pacs/wire.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace iodeep::pacs::wire {

using nlohmann::json;

namespace {

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("body is not JSON: ") + e.what());
  }
}

std::string hex_key(dicom::Tag tag) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%04X%04X", tag.group, tag.element);
  return buf;
}

json element_json(const dicom::DataElement& e);

json dataset_json(const dicom::DataSet& ds) {
  json out = json::object();
  for (const auto& [tag, e] : ds) {
    if (std::holds_alternative<dicom::Bytes>(e.value)) continue;
    out[hex_key(tag)] = element_json(e);
  }
  return out;
}

json element_json(const dicom::DataElement& e) {
  json out{{"vr", std::string(dicom::code(e.vr))}};
  json values = json::array();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dicom::Strings>) {
          for (const auto& s : v) {
            if (e.vr == dicom::VR::PN) {
              values.push_back(json{{"Alphabetic", s}});
            } else if (e.vr == dicom::VR::IS || e.vr == dicom::VR::DS) {
              // Numeric strings become numbers when they parse cleanly.
              try {
                std::size_t used = 0;
                const double d = std::stod(s, &used);
                if (used == s.size()) {
                  values.push_back(e.vr == dicom::VR::IS ? json(static_cast<long long>(d)) : json(d));
                  continue;
                }
              } catch (const std::exception&) {
              }
              values.push_back(s);
            } else {
              values.push_back(s);
            }
          }
        } else if constexpr (std::is_same_v<T, dicom::Items>) {
          for (const auto& item : v) values.push_back(dataset_json(item));
        } else if constexpr (!std::is_same_v<T, dicom::Bytes>) {
          for (const auto& x : v) values.push_back(x);
        }
      },
      e.value);
  if (!values.empty()) out["Value"] = std::move(values);
  return out;
}

json proposal_json(const workflow::RoiProposal& p) {
  json points = json::array();
  for (const auto& pt : p.polyline.points) points.push_back({pt.x, pt.y});
  return json{{"id", p.id},
              {"slice_ref_uid", p.slice_ref_uid},
              {"label", p.polyline.label},
              {"polyline", std::move(points)},
              {"confidence", p.confidence},
              {"status", std::string(workflow::status_name(p.status))}};
}

workflow::ProposalStatus status_from(const std::string& s) {
  if (s == "proposed") return workflow::ProposalStatus::Proposed;
  if (s == "accepted") return workflow::ProposalStatus::Accepted;
  if (s == "rejected") return workflow::ProposalStatus::Rejected;
  throw Error(Errc::InvalidRequest, "unknown proposal status '" + s + "'");
}

}  // namespace

std::string summaries_to_json(const std::vector<Summary>& summaries) {
  json out = json::array();
  for (const auto& s : summaries) out.push_back(s.attributes);
  return out.dump();
}

std::vector<Summary> summaries_from_json(std::string_view body, Level level) {
  const auto j = parse_body(body);
  if (!j.is_array()) throw Error(Errc::InvalidRequest, "query response is not an array");
  const char* uid_key = level == Level::Study    ? "StudyInstanceUID"
                        : level == Level::Series ? "SeriesInstanceUID"
                                                 : "SOPInstanceUID";
  std::vector<Summary> out;
  try {
    for (const auto& item : j) {
      Summary s{level, item.at(uid_key).get<std::string>(), {}};
      for (const auto& [k, v] : item.items()) s.attributes.emplace(k, v.get<std::string>());
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("malformed query response: ") + e.what());
  }
  return out;
}

std::string prediction_to_json(const workflow::PredictionResult& r) {
  json proposals = json::array();
  for (const auto& p : r.proposals) proposals.push_back(proposal_json(p));
  return json{{"session", r.session_id},
              {"slice_uid", r.slice_uid},
              {"frame_of_reference_uid", r.frame_of_reference_uid},
              {"dnn_uid", r.dnn_uid},
              {"dnn_name", r.dnn_name},
              {"proposals", std::move(proposals)}}
      .dump();
}

workflow::PredictionResult prediction_from_json(std::string_view body) {
  const auto j = parse_body(body);
  workflow::PredictionResult r;
  try {
    r.session_id = j.at("session").get<std::string>();
    r.slice_uid = j.at("slice_uid").get<std::string>();
    r.frame_of_reference_uid = j.at("frame_of_reference_uid").get<std::string>();
    r.dnn_uid = j.at("dnn_uid").get<std::string>();
    r.dnn_name = j.at("dnn_name").get<std::string>();
    for (const auto& item : j.at("proposals")) {
      workflow::RoiProposal p;
      p.id = item.at("id").get<std::string>();
      p.slice_ref_uid = item.at("slice_ref_uid").get<std::string>();
      p.polyline.slice_ref_uid = p.slice_ref_uid;
      p.polyline.label = item.at("label").get<std::string>();
      for (const auto& pt : item.at("polyline")) {
        p.polyline.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
      }
      p.confidence = item.at("confidence").get<double>();
      p.status = status_from(item.at("status").get<std::string>());
      r.proposals.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("malformed prediction: ") + e.what());
  }
  return r;
}

std::string validation_to_json(const ValidationRequest& request) {
  json decisions = json::array();
  for (auto d : request.decisions) decisions.push_back(d == rt::Decision::Accepted ? "accepted" : "rejected");
  return json{{"session", request.session}, {"decisions", std::move(decisions)}, {"reviewer", request.reviewer}}
      .dump();
}

ValidationRequest validation_from_json(std::string_view body) {
  const auto j = parse_body(body);
  ValidationRequest r;
  try {
    r.session = j.at("session").get<std::string>();
    r.reviewer = j.at("reviewer").get<std::string>();
    for (const auto& d : j.at("decisions")) {
      if (d.is_boolean()) {
        r.decisions.push_back(d.get<bool>() ? rt::Decision::Accepted : rt::Decision::Rejected);
      } else if (d == "accepted" || d == "accept") {
        r.decisions.push_back(rt::Decision::Accepted);
      } else if (d == "rejected" || d == "reject") {
        r.decisions.push_back(rt::Decision::Rejected);
      } else {
        throw Error(Errc::InvalidRequest, "decision must be accepted or rejected, got " + d.dump());
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("malformed validation request: ") + e.what());
  }
  return r;
}

std::string error_to_json(const Error& error) {
  json out{{"error", std::string(errc_name(error.code()))}, {"message", error.what()}};
  if (!error.stage().empty()) out["stage"] = error.stage();
  return out.dump();
}

Error error_from_json(std::string_view body, int status) {
  try {
    const auto j = json::parse(body);
    const auto code = errc_from_name(j.at("error").get<std::string>());
    const auto message = j.value("message", std::string{});
    if (code) return Error(*code, message, j.value("stage", std::string{}));
  } catch (const json::exception&) {
  }
  return Error(Errc::InvalidRequest, "server answered HTTP " + std::to_string(status) + ": " + std::string(body));
}

int http_status(Errc code) {
  switch (code) {
    case Errc::NotFound:
    case Errc::WeightsNotFound: return 404;
    case Errc::InvalidState: return 409;
    case Errc::IoFailure:
    case Errc::StoreFailure: return 500;
    case Errc::NoMatchingNetwork:
    case Errc::EmptyRoiSet:
    case Errc::FrameMismatch: return 422;
    default: return 400;
  }
}

std::string dataset_to_json(const dicom::DataSet& ds) { return dataset_json(ds).dump(); }

std::string uid_to_json(std::string_view key, std::string_view uid) {
  return json{{std::string(key), std::string(uid)}}.dump();
}

}  // namespace iodeep::pacs::wire
