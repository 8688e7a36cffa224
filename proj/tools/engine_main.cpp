// sceneloop-engine: the embedded engine behind the stdio protocol.
#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/protocol/server.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Serve the embedded scene engine over the line-delimited JSON protocol on stdin/stdout."};
    std::string asset_root = ".";
    app.add_option("--asset-root", asset_root, "Directory relative add_mesh paths resolve against")
        ->envname("SCENELOOP_ASSET_ROOT");
    CLI11_PARSE(app, argc, argv);

    std::ios::sync_with_stdio(false);
    sceneloop::engine::EmbeddedEngine engine(sceneloop::scene::ExecOptions{asset_root});
    const auto served = sceneloop::protocol::serve(engine, std::cin, std::cout, "embedded");
    std::cerr << "sceneloop-engine: served " << served << " requests\n";
    return 0;
}
