#include <json.hpp>

#include "eqlab/errors.hpp"
#include "eqlab/nn.hpp"

namespace eqlab::nn {

std::unique_ptr<Model> model_from_arch_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    std::string kind = j.at("kind").get<std::string>();
    Task task = Task::kRegression;
    if (j.contains("task")) {
        std::string t = j.at("task").get<std::string>();
        if (t == "classification")
            task = Task::kClassification;
        else if (t != "regression")
            throw ConfigError("model: unknown task " + t);
    }
    if (kind == "mlp") {
        MlpArch a;
        a.n_taps = j.at("n_taps").get<int>();
        a.n_features = j.value("n_features", 4);
        a.hidden = j.at("hidden").get<std::vector<int>>();
        a.n_outputs = j.at("n_outputs").get<int>();
        a.task = task;
        return make_mlp(a);
    }
    if (kind == "bilstm") {
        BiLstmArch a;
        a.n_taps = j.at("n_taps").get<int>();
        a.n_features = j.value("n_features", 4);
        a.hidden_units = j.at("hidden_units").get<int>();
        a.n_outputs = j.at("n_outputs").get<int>();
        a.task = task;
        return make_bilstm(a);
    }
    throw ConfigError("model: unknown kind " + kind);
}

}  // namespace eqlab::nn
