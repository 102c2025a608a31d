#include "spar/model_io.hpp"

#include <json.hpp>

#include "spar/error.hpp"

namespace spar {

using nlohmann::json;

namespace {

json to_array(const Vector& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector from_array(const json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

const char* rule_name(SelectionRule rule)
{
    return rule == SelectionRule::Best ? "best" : "1se";
}

} // namespace

std::string model_to_json(const SparModel& model)
{
    json doc;
    doc["format"] = "spar-model";
    doc["version"] = kModelFormatVersion;
    doc["p"] = model.p();
    doc["rule"] = rule_name(model.rule);
    doc["chosen_m"] = model.chosen_models;
    doc["chosen_lambda"] = model.chosen_lambda;
    doc["intercept"] = model.intercept;
    doc["coefficients"] = to_array(model.coefficients_orig);
    doc["coefficients_std"] = to_array(model.coefficients_std);
    doc["best"] = {{"m", model.best.models}, {"lambda", model.best.lambda}};
    doc["one_se"] = {{"m", model.one_se.models}, {"lambda", model.one_se.lambda}};
    doc["thresholds"] = model.thresholds;
    const auto& st = model.standardization;
    doc["standardization"] = {
        {"x_center", to_array(st.x_center)},
        {"x_scale", to_array(st.x_scale)},
        {"y_center", st.y_center},
        {"y_scale", st.y_scale},
        {"constant_columns", st.constant_columns},
    };
    json table = json::array();
    for (const auto& row : model.cv_table)
        table.push_back({{"m", row.models},
                         {"lambda", row.lambda},
                         {"mse", row.mse},
                         {"mse_se", row.mse_se},
                         {"num_active", row.num_active}});
    doc["cv_table"] = std::move(table);
    return doc.dump(2) + "\n";
}

SparModel model_from_json(std::string_view text)
{
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "spar-model")
            throw Error(ErrorCode::ParseError, "not a spar-model document");
        if (doc.at("version").get<int>() != kModelFormatVersion)
            throw Error(ErrorCode::ParseError, "unsupported model format version");
        SparModel model;
        model.rule = doc.at("rule").get<std::string>() == "best" ? SelectionRule::Best : SelectionRule::OneSe;
        model.chosen_models = doc.at("chosen_m").get<int>();
        model.chosen_lambda = doc.at("chosen_lambda").get<double>();
        model.intercept = doc.at("intercept").get<double>();
        model.coefficients_orig = from_array(doc.at("coefficients"));
        model.coefficients_std = from_array(doc.at("coefficients_std"));
        if (model.coefficients_orig.size() != doc.at("p").get<Index>())
            throw Error(ErrorCode::ParseError, "coefficient count differs from p");
        model.best = {doc.at("best").at("m").get<int>(), doc.at("best").at("lambda").get<double>(), 0};
        model.one_se = {doc.at("one_se").at("m").get<int>(), doc.at("one_se").at("lambda").get<double>(), 0};
        model.thresholds = doc.at("thresholds").get<std::vector<double>>();
        const json& st = doc.at("standardization");
        model.standardization.x_center = from_array(st.at("x_center"));
        model.standardization.x_scale = from_array(st.at("x_scale"));
        model.standardization.y_center = st.at("y_center").get<double>();
        model.standardization.y_scale = st.at("y_scale").get<double>();
        model.standardization.constant_columns = st.at("constant_columns").get<IndexSet>();
        for (const auto& row : doc.at("cv_table"))
            model.cv_table.push_back({row.at("m").get<int>(), row.at("lambda").get<double>(), row.at("mse").get<double>(),
                                      row.at("mse_se").get<double>(), row.at("num_active").get<Index>()});
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace spar
