use std::fmt::Write as _;

use ndarray::Array2;

use crate::layers::AttnMode;
use crate::model::{Layer, TransformerModel};

fn block(out: &mut String, name: &str, m: &Array2<f64>) {
    writeln!(out, "{name} {} {}", m.nrows(), m.ncols()).unwrap();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
}

/// Header line, then every layer's matrices at full precision.
pub fn dump_model(model: &TransformerModel) -> String {
    let mode = match model.mode {
        AttnMode::HardPattern => "hard",
        AttnMode::Saturated { .. } => "saturated",
    };
    let mut out = format!(
        "TFSIM v1 n={} d={} N={:?} lambda={:?} mode={mode}\n",
        model.n, model.d, model.big_n, model.lambda
    );
    for (i, layer) in model.layers.iter().enumerate() {
        match layer {
            Layer::Attn(attn) => {
                writeln!(out, "layer {} attention heads={}", i + 1, attn.heads.len()).unwrap();
                for (h, head) in attn.heads.iter().enumerate() {
                    let biases: Vec<String> = head.biases.iter().map(|b| format!("{b:?}")).collect();
                    writeln!(out, "head {} sink={:?} biases=[{}]", h + 1, head.sink, biases.join(",")).unwrap();
                    block(&mut out, "query", &head.query);
                    block(&mut out, "key", &head.key);
                    block(&mut out, "value", &head.value);
                }
            }
            Layer::Mlp(mlp) => {
                let norm = mlp.normalize.map_or("none".to_string(), |(len, eps)| format!("l2:{len}:{eps:?}"));
                writeln!(out, "layer {} mlp hidden={} normalize={norm}", i + 1, mlp.inner.nrows()).unwrap();
                block(&mut out, "inner", &mlp.inner);
                block(&mut out, "outer", &mlp.outer);
            }
        }
    }
    out
}
