// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Scene file schema (YAML, version 1):
//
//   version: 1
//   tile_side: 1.0
//   surfaces:
//     - name: west
//       origin: [0, 0, 0]
//       edge_u: [0, 15, 0]
//       edge_v: [0, 0, 3]
//       normal: [1, 0, 0]
//       material: tiled        # or: concrete

#include "hypersim/scene.hpp"

#include "hypersim/errors.hpp"
#include "yaml_support.hpp"

#include <fstream>
#include <sstream>

namespace hypersim
{

Scene scene_from_yaml(const YAML::Node &root)
{
    using namespace yamlsup;
    if (!root.IsMap())
        throw SchemaError("scene must be a mapping", line_of(root));
    const int version = require<int>(root, "version");
    if (version != 1)
        throw SchemaError("unsupported scene version " + std::to_string(version), line_of(root["version"]));
    Scene scene(optional<double>(root, "tile_side", 1.0));
    const YAML::Node surfaces = root["surfaces"];
    if (!surfaces || !surfaces.IsSequence())
        throw SchemaError("'surfaces' must be a sequence", line_of(surfaces ? surfaces : root));
    for (const YAML::Node &s : surfaces)
    {
        const std::string material = require<std::string>(s, "material");
        Material m;
        if (material == "tiled")
            m = Material::TiledWall;
        else if (material == "concrete")
            m = Material::Concrete;
        else
            throw SchemaError("unknown material '" + material + "'", line_of(s["material"]));
        try
        {
            scene.add_surface(require<std::string>(s, "name"), require_vec3(s, "origin"), require_vec3(s, "edge_u"),
                              require_vec3(s, "edge_v"), m, require_vec3(s, "normal"));
        }
        catch (const SchemaError &)
        {
            throw;
        }
        catch (const Error &e)
        {
            throw SchemaError(e.what(), line_of(s));
        }
    }
    return scene;
}

void scene_to_yaml(YAML::Emitter &out, const Scene &scene)
{
    using namespace yamlsup;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << 1;
    out << YAML::Key << "tile_side" << YAML::Value << scene.tile_side();
    out << YAML::Key << "surfaces" << YAML::Value << YAML::BeginSeq;
    for (const Surface &s : scene.surfaces())
    {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << s.name;
        out << YAML::Key << "origin" << YAML::Value;
        emit_vec3(out, s.origin);
        out << YAML::Key << "edge_u" << YAML::Value;
        emit_vec3(out, s.edge_u);
        out << YAML::Key << "edge_v" << YAML::Value;
        emit_vec3(out, s.edge_v);
        out << YAML::Key << "normal" << YAML::Value;
        emit_vec3(out, s.true_normal);
        out << YAML::Key << "material" << YAML::Value
            << (s.material == Material::TiledWall ? "tiled" : "concrete");
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
}

Scene parse_scene(const std::string &text)
{
    return scene_from_yaml(yamlsup::parse(text));
}

Scene load_scene(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open scene file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

std::string dump_scene(const Scene &scene)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    scene_to_yaml(out, scene);
    return std::string(out.c_str()) + "\n";
}

} // namespace hypersim
