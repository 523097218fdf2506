// Regenerates the bundled fixture files under tests/fixtures/. The outputs
// are committed; rerun only when the formats or builders change.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bench500/executor.hpp"
#include "bench500/fixtures.hpp"
#include "bench500/model_io.hpp"

using namespace bench500;
using nlohmann::json;

namespace {

json tensor_to_json(const Tensor& t) {
    auto bytes = t.to_bytes();
    return json{{"dtype", dtype_name(t.dtype())},
                {"shape", t.shape()},
                {"data", base64_encode(bytes)}};
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << doc.dump();
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "tests/fixtures";
    std::filesystem::create_directories(dir);

    // LeNet-class classifier with frozen golden outputs from the f64 path.
    NetworkGraph lenet = build_lenet(10, 424242, DType::F64);
    save_model_file(lenet, dir + "/lenet.json");

    Rng rng(5150, 0);
    Tensor image = Tensor::uniform({DType::F64, {2, 28, 28}}, rng, 0, 1);
    Tensor labels = Tensor::from_values({DType::F64, {2}}, std::vector<double>{3, 7});
    auto result = inference(lenet, {{"x", image}, {"labels", labels}});
    write_json(json{{"x", tensor_to_json(image)}, {"labels", tensor_to_json(labels)}},
               dir + "/lenet_input.json");
    write_json(json{{"loss", tensor_to_json(result.outputs.at("loss"))},
                    {"probs", tensor_to_json(result.outputs.at("probs"))}},
               dir + "/lenet_golden.json");

    // Conv fixture for the micro-batch transform.
    NetworkGraph convnet = build_conv_net(1, 4, 2, 777, DType::F32);
    save_model_file(convnet, dir + "/convnet.json");

    // DeepBench-class operator shape list, including the two box-plot sizes.
    std::ofstream shapes(dir + "/deepbench_sample.csv");
    shapes << "# op,params...\n"
              "gemm,2560,2560,64\n"
              "gemm,1760,1760,128\n"
              "gemm,128,128,64\n"
              "conv,16,3,224,224,64,3,3,1,1,1,1,1,1\n"
              "conv,8,16,32,32,32,3,3,1,1,1,1,1,1\n"
              "maxpool,8,8,32,32,2,2,2,2\n"
              "medianpool,8,8,32,32,2,2,2,2\n"
              "softmaxxent,256,10\n"
              "relu,65536\n";
    std::cout << "fixtures written to " << dir << "\n";
    return 0;
}
