// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include <json.hpp>

#include "radtag/codes.hpp"
#include "radtag/decoder.hpp"
#include "radtag/iq_frame.hpp"
#include "radtag/radar.hpp"
#include "radtag/scene.hpp"

namespace radtag {

using Json = nlohmann::ordered_json;

Json to_json(const RadarConfig& cfg);
RadarConfig radar_config_from_json(const Json& j);

Json to_json(const TagSpec& t);
TagSpec tag_from_json(const Json& j);
Json to_json(const ClutterObject& c);
ClutterObject clutter_from_json(const Json& j);
Json to_json(const Scene& s);
Scene scene_from_json(const Json& j);

Json to_json(const DecoderOptions& o);
DecoderOptions decoder_options_from_json(const Json& j);

Json to_json(const GoldCodebook& book);
Json to_json(const DetectionReport& rep);
std::string report_csv(const DetectionReport& rep);

// Little-endian float32 I/Q interleaved, [rx][chirp][sample]; sidecar at path + ".json".
void write_iq(const std::string& path, const IQFrameF& frame);
IQFrameF read_iq(const std::string& path);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);

// Fixed formatting keeps CSV and JSON byte-stable.
std::string fmt_num(double v, int digits = 6);

}  // namespace radtag
