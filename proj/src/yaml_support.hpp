// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Internal helpers for the structured-text file formats. Schema violations
// are reported as SchemaError carrying the 1-based line of the offending node.

#pragma once

#include "hypersim/errors.hpp"
#include "hypersim/scene.hpp"

#include <yaml-cpp/yaml.h>

#include <string>

namespace hypersim
{

Scene scene_from_yaml(const YAML::Node &root);
void scene_to_yaml(YAML::Emitter &out, const Scene &scene);

namespace yamlsup
{

inline int line_of(const YAML::Node &node)
{
    const YAML::Mark m = node.Mark();
    return m.is_null() ? -1 : m.line + 1;
}

inline YAML::Node parse(const std::string &text)
{
    try
    {
        return YAML::Load(text);
    }
    catch (const YAML::ParserException &e)
    {
        throw SchemaError(e.msg, e.mark.line + 1);
    }
}

template <typename T>
T convert(const YAML::Node &node, const std::string &key)
{
    try
    {
        return node.as<T>();
    }
    catch (const YAML::Exception &)
    {
        throw SchemaError("field '" + key + "' has the wrong type", line_of(node));
    }
}

template <typename T>
T require(const YAML::Node &parent, const std::string &key)
{
    if (!parent.IsMap())
        throw SchemaError("expected a mapping containing '" + key + "'", line_of(parent));
    const YAML::Node node = parent[key];
    if (!node)
        throw SchemaError("missing required field '" + key + "'", line_of(parent));
    return convert<T>(node, key);
}

template <typename T>
T optional(const YAML::Node &parent, const std::string &key, T fallback)
{
    const YAML::Node node = parent[key];
    return node ? convert<T>(node, key) : fallback;
}

inline Vec3 to_vec3(const YAML::Node &node, const std::string &key)
{
    if (!node.IsSequence() || node.size() != 3)
        throw SchemaError("field '" + key + "' must be a 3-element list", line_of(node));
    return {convert<double>(node[0], key), convert<double>(node[1], key), convert<double>(node[2], key)};
}

inline Vec3 require_vec3(const YAML::Node &parent, const std::string &key)
{
    if (!parent.IsMap() || !parent[key])
        throw SchemaError("missing required field '" + key + "'", line_of(parent));
    return to_vec3(parent[key], key);
}

inline void emit_vec3(YAML::Emitter &out, const Vec3 &v)
{
    out << YAML::Flow << YAML::BeginSeq << v.x << v.y << v.z << YAML::EndSeq;
}

} // namespace yamlsup
} // namespace hypersim
