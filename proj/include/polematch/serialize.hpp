#pragma once

#include <string>

#include <json.hpp>

#include "polematch/adaptive.hpp"
#include "polematch/prom.hpp"
#include "polematch/types.hpp"

namespace polematch {

using json = nlohmann::ordered_json;

// Schemas:
//   PoleResidueROM  {"param": x, "D": [[a,b,c1,c2],...], "S": [[lambda,c],...]}
//   StateSpaceROM   {"A": [[...],...], "B": [...], "C": [...]}
//   Repository      {"params": [...], "roms": [...], "i_h": n, "config": {...}}
//   RegressedPROM   {"q": n, "domain": [pL,pU], "d_coeffs": [...], "s_coeffs": [...]}

json to_json(const PoleResidueROM& rom);
PoleResidueROM rom_from_json(const json& j);

json to_json(const StateSpaceROM& rom);
StateSpaceROM statespace_from_json(const json& j);

json to_json(const Repository& repo, const json& config);
Repository repository_from_json(const json& j, json* config = nullptr);

json to_json(const RegressedPROM& rp);
RegressedPROM regressed_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

/// Detects StateSpaceROM vs PoleResidueROM files by their keys and converts
/// state-space input to the pole-residue realization.
PoleResidueROM load_rom_any(const std::string& path, double param_hint);

}  // namespace polematch
