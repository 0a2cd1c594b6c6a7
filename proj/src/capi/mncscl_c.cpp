#include "mncscl/mncscl.h"

#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "core/config.hpp"
#include "core/runner.hpp"

struct mncscl_session {
    mncscl::RunConfig config;
    std::string error;
};

namespace {

template <typename Fn>
int guarded(mncscl_session* s, Fn&& fn) {
    if (!s) return MNCSCL_CONFIG_ERROR;
    s->error.clear();
    try {
        fn(*s);
        return MNCSCL_OK;
    } catch (const std::invalid_argument& e) {
        s->error = e.what();
        return MNCSCL_CONFIG_ERROR;
    } catch (const std::exception& e) {
        s->error = e.what();
        return MNCSCL_RUNTIME_ERROR;
    }
}

std::string require(const char* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string("null ") + what);
    return p;
}

}  // namespace

extern "C" {

const char* mncscl_version(void) { return "1.0.0"; }

mncscl_session* mncscl_session_create(void) { return new (std::nothrow) mncscl_session(); }

void mncscl_session_destroy(mncscl_session* s) { delete s; }

int mncscl_load_config_file(mncscl_session* s, const char* path) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config = mncscl::load_config_file(require(path, "config path"));
    });
}

int mncscl_load_config_json(mncscl_session* s, const char* json_text) {
    return guarded(s, [&](mncscl_session& sess) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(require(json_text, "config text"));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("config parse error: ") + e.what());
        }
        sess.config = mncscl::config_from_json(j);
    });
}

int mncscl_set_command(mncscl_session* s, const char* command) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.command = require(command, "command");
    });
}

int mncscl_set_out_dir(mncscl_session* s, const char* dir) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.out_dir = require(dir, "output directory");
    });
}

int mncscl_set_dataset(mncscl_session* s, const char* bundle_dir) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.dataset_dir = require(bundle_dir, "dataset directory");
        sess.config.use_sbm = false;
    });
}

int mncscl_set_checkpoint(mncscl_session* s, const char* path) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.checkpoint = require(path, "checkpoint path");
    });
}

int mncscl_set_seed(mncscl_session* s, unsigned long long base) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.train.seeds.init = base;
        sess.config.train.seeds.shuffle = base + 1;
        sess.config.train.seeds.corruption = base + 2;
    });
}

int mncscl_set_loss(mncscl_session* s, const char* mode) {
    return guarded(s, [&](mncscl_session& sess) {
        sess.config.train.loss = mncscl::loss_mode_from_string(require(mode, "loss mode"));
    });
}

int mncscl_set_subgraphs(mncscl_session* s, const char* csv) {
    return guarded(s, [&](mncscl_session& sess) {
        std::stringstream in(require(csv, "subgraph list"));
        std::vector<mncscl::SubgraphKind> kinds;
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) kinds.push_back(mncscl::subgraph_kind_from_string(item));
        if (kinds.empty()) throw std::invalid_argument("empty subgraph list");
        sess.config.train.kinds = std::move(kinds);
    });
}

int mncscl_run(mncscl_session* s) {
    if (!s) return MNCSCL_CONFIG_ERROR;
    s->error.clear();
    mncscl::RunResult result = mncscl::run(s->config);
    s->error = result.error;
    return result.exit_code;
}

const char* mncscl_last_error(const mncscl_session* s) {
    return s ? s->error.c_str() : "null session";
}

}  // extern "C"
