#pragma once

#include <json.hpp>

#include "proxid/id_engine.hpp"

namespace proxid {

using Json = nlohmann::ordered_json;

Json report_json(const PreconditionReport& r);

// {query, status, H, districts, functional, attempts, ...}; key order is fixed
// so equal results serialize to identical bytes.
Json certificate_json(const IdentQuery& q, const IdentResult& r);

}  // namespace proxid
