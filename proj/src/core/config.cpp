#include "core/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "core/cache.hpp"

namespace mncscl {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + where + "." + it.key() + "'");
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

SimilaritySign similarity_from_string(const std::string& s) {
    if (s == "distance") return SimilaritySign::Distance;
    if (s == "literal") return SimilaritySign::Literal;
    throw std::invalid_argument("unknown similarity sign: '" + s + "'");
}

std::string to_string(SimilaritySign s) {
    return s == SimilaritySign::Distance ? "distance" : "literal";
}

CommunalStrategy strategy_from_string(const std::string& s) {
    if (s == "s1") return CommunalStrategy::S1;
    if (s == "s2") return CommunalStrategy::S2;
    if (s == "s3") return CommunalStrategy::S3;
    throw std::invalid_argument("unknown communal strategy: '" + s + "'");
}

std::string to_string(CommunalStrategy s) {
    switch (s) {
        case CommunalStrategy::S1: return "s1";
        case CommunalStrategy::S2: return "s2";
        case CommunalStrategy::S3: return "s3";
    }
    return "?";
}

void parse_train(const json& j, TrainConfig& t) {
    require_keys(j, "train",
                 {"encoder", "subgraphs", "loss", "embed_dim", "lr", "max_epochs", "patience",
                  "improve_tol", "select_best", "ppr_alpha", "corruption", "subgraph", "seeds",
                  "cache_dir"});
    if (j.contains("encoder")) t.encoder = encoder_kind_from_string(j.at("encoder"));
    if (j.contains("subgraphs")) {
        t.kinds.clear();
        for (const auto& s : j.at("subgraphs"))
            t.kinds.push_back(subgraph_kind_from_string(s.get<std::string>()));
    }
    if (j.contains("loss")) t.loss = loss_mode_from_string(j.at("loss"));
    get_if(j, "embed_dim", t.embed_dim);
    get_if(j, "lr", t.lr);
    get_if(j, "max_epochs", t.max_epochs);
    get_if(j, "patience", t.patience);
    get_if(j, "improve_tol", t.improve_tol);
    get_if(j, "select_best", t.select_best);
    get_if(j, "ppr_alpha", t.ppr_alpha);
    get_if(j, "cache_dir", t.cache_dir);
    if (j.contains("corruption")) {
        const json& c = j.at("corruption");
        require_keys(c, "train.corruption", {"mode", "t", "order", "topk", "redraw"});
        if (c.contains("mode")) t.corruption = corruption_mode_from_string(c.at("mode"));
        get_if(c, "t", t.heat_t);
        get_if(c, "order", t.heat_order);
        get_if(c, "topk", t.diffusion_topk);
        get_if(c, "redraw", t.corruption_redraw);
    }
    if (j.contains("subgraph")) {
        const json& s = j.at("subgraph");
        require_keys(s, "train.subgraph",
                     {"d", "l", "clusters", "beta", "iters", "eta", "est_hidden", "strategy",
                      "similarity_sign"});
        get_if(s, "d", t.hyper.d);
        get_if(s, "l", t.hyper.l);
        get_if(s, "clusters", t.hyper.clusters);
        get_if(s, "beta", t.hyper.beta);
        get_if(s, "iters", t.hyper.iters);
        get_if(s, "eta", t.hyper.eta);
        get_if(s, "est_hidden", t.hyper.est_hidden);
        if (s.contains("strategy")) t.hyper.strategy = strategy_from_string(s.at("strategy"));
        if (s.contains("similarity_sign"))
            t.hyper.similarity = similarity_from_string(s.at("similarity_sign"));
    }
    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        require_keys(s, "train.seeds", {"init", "shuffle", "corruption"});
        get_if(s, "init", t.seeds.init);
        get_if(s, "shuffle", t.seeds.shuffle);
        get_if(s, "corruption", t.seeds.corruption);
    }
}

}  // namespace

void RunConfig::validate() const {
    static const std::set<std::string> commands = {"train",     "embed",  "eval-node",
                                                   "eval-link", "ablate", "gradcheck"};
    if (!commands.count(command))
        throw std::invalid_argument("unknown command: '" + command + "'");
    if (command != "gradcheck" && dataset_dir.empty() && !use_sbm)
        throw std::invalid_argument("config: a dataset (bundle or sbm) is required");
    train.validate();
    if (eval.classifier_repeats < 1)
        throw std::invalid_argument("config: classifier_repeats must be >= 1");
    if (eval.link_val_frac < 0 || eval.link_test_frac <= 0 ||
        eval.link_val_frac + eval.link_test_frac >= 1.0)
        throw std::invalid_argument("config: bad link split fractions");
}

RunConfig config_from_json(const nlohmann::json& j) {
    require_keys(j, "", {"command", "dataset", "train", "eval", "out", "checkpoint"});
    RunConfig cfg;
    get_if(j, "command", cfg.command);
    get_if(j, "out", cfg.out_dir);
    get_if(j, "checkpoint", cfg.checkpoint);
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        require_keys(d, "dataset", {"bundle", "sbm"});
        if (d.contains("bundle") && d.contains("sbm"))
            throw std::invalid_argument("config: dataset must be a bundle or sbm, not both");
        if (d.contains("bundle")) cfg.dataset_dir = d.at("bundle").get<std::string>();
        if (d.contains("sbm")) {
            cfg.use_sbm = true;
            const json& s = d.at("sbm");
            require_keys(s, "dataset.sbm",
                         {"blocks", "per_block", "p_in", "p_out", "feat_dim", "seed"});
            get_if(s, "blocks", cfg.sbm.blocks);
            get_if(s, "per_block", cfg.sbm.per_block);
            get_if(s, "p_in", cfg.sbm.p_in);
            get_if(s, "p_out", cfg.sbm.p_out);
            get_if(s, "feat_dim", cfg.sbm.feat_dim);
            get_if(s, "seed", cfg.sbm.seed);
        }
    }
    if (j.contains("train")) parse_train(j.at("train"), cfg.train);
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        require_keys(e, "eval",
                     {"classifier_repeats", "classifier_lr", "classifier_steps", "classifier_l2",
                      "link_val_frac", "link_test_frac", "seed"});
        get_if(e, "classifier_repeats", cfg.eval.classifier_repeats);
        get_if(e, "classifier_lr", cfg.eval.classifier_lr);
        get_if(e, "classifier_steps", cfg.eval.classifier_steps);
        get_if(e, "classifier_l2", cfg.eval.classifier_l2);
        get_if(e, "link_val_frac", cfg.eval.link_val_frac);
        get_if(e, "link_test_frac", cfg.eval.link_test_frac);
        get_if(e, "seed", cfg.eval.seed);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["out"] = cfg.out_dir;
    if (!cfg.checkpoint.empty()) j["checkpoint"] = cfg.checkpoint;
    if (cfg.use_sbm) {
        j["dataset"]["sbm"] = {{"blocks", cfg.sbm.blocks},   {"per_block", cfg.sbm.per_block},
                               {"p_in", cfg.sbm.p_in},       {"p_out", cfg.sbm.p_out},
                               {"feat_dim", cfg.sbm.feat_dim}, {"seed", cfg.sbm.seed}};
    } else if (!cfg.dataset_dir.empty()) {
        j["dataset"]["bundle"] = cfg.dataset_dir;
    }
    json kinds = json::array();
    for (auto k : cfg.train.kinds) kinds.push_back(to_string(k));
    j["train"] = {
        {"encoder", to_string(cfg.train.encoder)},
        {"subgraphs", kinds},
        {"loss", to_string(cfg.train.loss)},
        {"embed_dim", cfg.train.embed_dim},
        {"lr", cfg.train.lr},
        {"max_epochs", cfg.train.max_epochs},
        {"patience", cfg.train.patience},
        {"improve_tol", cfg.train.improve_tol},
        {"select_best", cfg.train.select_best},
        {"ppr_alpha", cfg.train.ppr_alpha},
        {"cache_dir", cfg.train.cache_dir},
        {"corruption",
         {{"mode", to_string(cfg.train.corruption)},
          {"t", cfg.train.heat_t},
          {"order", cfg.train.heat_order},
          {"topk", cfg.train.diffusion_topk},
          {"redraw", cfg.train.corruption_redraw}}},
        {"subgraph",
         {{"d", cfg.train.hyper.d},
          {"l", cfg.train.hyper.l},
          {"clusters", cfg.train.hyper.clusters},
          {"beta", cfg.train.hyper.beta},
          {"iters", cfg.train.hyper.iters},
          {"eta", cfg.train.hyper.eta},
          {"est_hidden", cfg.train.hyper.est_hidden},
          {"strategy", to_string(cfg.train.hyper.strategy)},
          {"similarity_sign", to_string(cfg.train.hyper.similarity)}}},
        {"seeds",
         {{"init", cfg.train.seeds.init},
          {"shuffle", cfg.train.seeds.shuffle},
          {"corruption", cfg.train.seeds.corruption}}},
    };
    j["eval"] = {{"classifier_repeats", cfg.eval.classifier_repeats},
                 {"classifier_lr", cfg.eval.classifier_lr},
                 {"classifier_steps", cfg.eval.classifier_steps},
                 {"classifier_l2", cfg.eval.classifier_l2},
                 {"link_val_frac", cfg.eval.link_val_frac},
                 {"link_test_frac", cfg.eval.link_test_frac},
                 {"seed", cfg.eval.seed}};
    return j;
}

void write_config_echo(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config echo: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

std::uint64_t config_hash(const RunConfig& cfg) {
    json j = config_to_json(cfg);
    j.erase("out");  // output location does not change what the run computes
    return fnv1a(j.dump());
}

Graph load_dataset(const RunConfig& cfg) {
    if (cfg.use_sbm)
        return synth_sbm(cfg.sbm.blocks, cfg.sbm.per_block, cfg.sbm.p_in, cfg.sbm.p_out,
                         cfg.sbm.feat_dim, cfg.sbm.seed);
    return load_bundle(cfg.dataset_dir);
}

}  // namespace mncscl
