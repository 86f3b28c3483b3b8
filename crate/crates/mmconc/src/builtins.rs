//! Built-in scenarios, written in the same JSON schema as user configs.

use serde_json::{json, Value};

use crate::commands::Command;
use crate::error::AppError;

pub const BUILTINS: [&str; 8] = [
    "two-point-mmdist",
    "sym-chain",
    "hypercube-levy",
    "defect-suite",
    "z3-regular-theorem2",
    "theorem2-suite",
    "cube-to-point",
    "standard-objects",
];

pub fn builtin(name: &str) -> Result<Command, AppError> {
    let (command, config) = match name {
        "two-point-mmdist" => ("mmdist", two_point_mmdist()),
        "sym-chain" => ("obsdiam", sym_chain()),
        "hypercube-levy" => ("levy-scan", hypercube_levy()),
        "defect-suite" => ("invariance-defect", defect_suite()),
        "z3-regular-theorem2" => ("flow-check", json!({ "scenarios": [z3_regular()] })),
        "theorem2-suite" => ("flow-check", theorem2_suite()),
        "cube-to-point" => ("concentrate", cube_to_point()),
        "standard-objects" => ("generate", standard_objects()),
        _ => return Err(AppError::UnknownBuiltin(name.to_string())),
    };
    let mut tagged = config;
    tagged["command"] = Value::from(command);
    Ok(serde_json::from_value(tagged)?)
}

fn uniform() -> Value {
    json!({ "uniform": true })
}

fn two_point_mmdist() -> Value {
    json!({
        "space": { "dist": [[0.0, 1.0], [1.0, 0.0]] },
        "mu": { "point": 0 },
        "nu": uniform(),
        "metric": "both"
    })
}

fn sym_chain() -> Value {
    let ns: Vec<usize> = (3..=6).collect();
    json!({
        "spaces": ns.iter().map(|&n| json!({ "space": { "generator": "sym", "n": n, "metric": "normalized_hamming" } })).collect::<Vec<_>>(),
        "indices": ns,
        "alphas": [0.5, 0.2, 0.1],
        "budget": 64
    })
}

fn hypercube_levy() -> Value {
    let ns: Vec<usize> = (2..=10).collect();
    json!({
        "sequence": ns.iter().map(|&n| json!({ "space": { "generator": "hypercube", "n": n } })).collect::<Vec<_>>(),
        "indices": ns,
        "alphas": [0.3, 0.2, 0.1],
        "budget": 64
    })
}

fn defect_suite() -> Value {
    json!({
        "items": [
            { "name": "z5-point", "group": { "generator": "cyclic", "n": 5 }, "measure": { "point": 0 } },
            { "name": "z6-mixture", "group": { "generator": "cyclic", "n": 6 },
              "measure": { "weights": [0.25, 0.25, 0.125, 0.125, 0.125, 0.125] } },
            { "name": "sym3-point", "group": { "generator": "sym", "n": 3 }, "measure": { "point": 0 } },
            { "name": "sym4-haar", "group": { "generator": "sym", "n": 4 }, "measure": uniform() },
            { "name": "sym4-weighted-point", "group": { "generator": "sym", "n": 4, "metric": { "weighted": [0.4, 0.3, 0.2, 0.1] } },
              "measure": { "point": 0 } },
            { "name": "cube3-bernoulli", "group": { "generator": "hypercube", "n": 3 }, "measure": { "bernoulli": [0.5, 0.3, 0.2] } }
        ]
    })
}

fn regular(name: &str, group: Value, measures: Vec<Value>, elements: Vec<usize>) -> Value {
    json!({
        "name": name,
        "flow": { "generator": "regular", "group": group },
        "measures": measures,
        "nu": uniform(),
        "elements": elements
    })
}

fn z3_regular() -> Value {
    regular(
        "z3-regular",
        json!({ "generator": "cyclic", "n": 3, "metric": "geodesic" }),
        vec![uniform(), uniform()],
        vec![1],
    )
}

fn theorem2_suite() -> Value {
    let mut scenarios = vec![
        json!({
            "name": "trivial-z4-on-cycle5",
            "flow": { "generator": "trivial", "group": { "generator": "cyclic", "n": 4 }, "space": { "generator": "cyclic", "n": 5 } },
            "measures": [uniform()],
            "nu": uniform(),
            "elements": [1, 2, 3]
        }),
        json!({
            "name": "trivial-sym3-on-two-points",
            "flow": { "generator": "trivial", "group": { "generator": "sym", "n": 3 }, "space": { "generator": "hypercube", "n": 1 } },
            "measures": [uniform(), { "point": 0 }],
            "nu": { "point": 1 },
            "elements": [0, 1, 2, 3, 4, 5]
        }),
        z3_regular(),
    ];
    for n in 4..=8 {
        scenarios.push(regular(
            &format!("z{n}-regular"),
            json!({ "generator": "cyclic", "n": n }),
            vec![uniform(), uniform()],
            vec![1],
        ));
    }
    scenarios.push(json!({
        "name": "z4-two-orbit",
        "flow": { "generator": "union", "gap": 1.0, "parts": [
            { "generator": "regular", "group": { "generator": "cyclic", "n": 4 } },
            { "generator": "trivial", "group": { "generator": "cyclic", "n": 4 }, "space": { "dist": [[0.0]] } }
        ] },
        "measures": [uniform(), uniform()],
        "nu": { "haar_average": { "weights": [0.5, 0.0, 0.0, 0.0, 0.5] } },
        "elements": [1]
    }));
    // measures approaching Haar from a point mass
    let mixtures: Vec<Value> = [0.5, 0.25, 0.125, 0.0625]
        .iter()
        .map(|&t: &f64| {
            let mut w = vec![(1.0 - t) / 5.0; 5];
            w[0] += t;
            json!({ "weights": w })
        })
        .collect();
    scenarios.push(regular(
        "z5-near-invariant",
        json!({ "generator": "cyclic", "n": 5 }),
        mixtures,
        vec![1, 4],
    ));
    scenarios.push(regular(
        "sym3-regular",
        json!({ "generator": "sym", "n": 3 }),
        vec![uniform(), uniform()],
        (0..6).collect(),
    ));
    scenarios.push(regular(
        "sym4-regular",
        json!({ "generator": "sym", "n": 4 }),
        vec![uniform(), uniform()],
        vec![1, 2, 6],
    ));
    json!({ "scenarios": scenarios })
}

fn cube_to_point() -> Value {
    let ns: Vec<usize> = (1..=6).collect();
    json!({
        "sequence": ns.iter().map(|&n| json!({ "space": { "generator": "hypercube", "n": n } })).collect::<Vec<_>>(),
        "target": { "space": { "dist": [[0.0]] } },
        "maps": ns.iter().map(|&n| vec![0; 1 << n]).collect::<Vec<_>>(),
        "budget": 64,
        "eps": 0.25
    })
}

fn standard_objects() -> Value {
    json!({
        "objects": [
            { "name": "cube3", "space": { "generator": "hypercube", "n": 3 } },
            { "name": "cycle4", "space": { "generator": "cyclic", "n": 4, "metric": "geodesic" } },
            { "name": "sym3-space", "space": { "generator": "sym", "n": 3 } },
            { "name": "z5", "group": { "generator": "cyclic", "n": 5 } },
            { "name": "sym3", "group": { "generator": "sym", "n": 3, "metric": { "weighted": [0.5, 0.3, 0.2] } } },
            { "name": "z2-squared", "group": { "generator": "hypercube", "n": 2 } },
            { "name": "z4-regular", "flow": { "generator": "regular", "group": { "generator": "cyclic", "n": 4 } } },
            { "name": "z4-cosets", "flow": { "generator": "coset", "group": { "generator": "cyclic", "n": 4 }, "subgroup": [0, 2] } },
            { "name": "bernoulli2", "measure": { "bernoulli": [0.5, 0.25] }, "n": 4 },
            { "name": "product", "measure": { "product": [[0.5, 0.5], [0.2, 0.3, 0.5]] }, "n": 6 }
        ]
    })
}
