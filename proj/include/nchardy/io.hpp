#pragma once

#include <string>

#include <json.hpp>

#include "nchardy/factor.hpp"
#include "nchardy/szego_opt.hpp"

namespace nchardy {

using json = nlohmann::json;

/// Element JSON: {"kind": "matrix"|"torus", "n": int, "blocks": [int]|null,
/// "degree": int|null, "data": ...}; complex entries as [re, im]; torus data
/// keyed by signed-integer strings. Round-trips bit-exactly. "quad_nodes" is
/// emitted when it differs from the default 4*degree + 1.
json element_to_json(const Element& x);
Element element_from_json(const json& j);

json to_json(const FactorizationResult& r);
json to_json(const OuterReport& r);
json to_json(const SzegoReport& r);
json to_json(const RieszResult& r);

Element load_element(const std::string& path);
void save_element(const Element& x, const std::string& path);

}  // namespace nchardy
