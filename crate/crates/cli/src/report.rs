//! Report rendering: text tables, JSON, and CSV. Text rounds to two
//! decimals at render time; JSON and CSV carry the same underlying values.

use serde_json::{json, Map, Value};

use kitti_eval::eval::default_iou_threshold;
use kitti_eval::metrics::{EvalGrid, EvalReport, OVERALL};

pub fn config_json(grid: &EvalGrid) -> Value {
    let iou: Map<String, Value> = grid
        .classes
        .iter()
        .map(|c| {
            let thr = grid.iou_thresholds.get(c).copied().unwrap_or_else(|| default_iou_threshold(c));
            (c.clone(), json!(thr))
        })
        .collect();
    json!({
        "classes": grid.classes,
        "difficulties": grid.difficulties,
        "metrics": grid.metrics.iter().map(|m| m.key()).collect::<Vec<_>>(),
        "iou_thresholds": iou,
        "ap_points": grid.ap_points,
        "recall_samples": grid.recall_samples,
    })
}

fn row_labels(report: &EvalReport) -> Vec<String> {
    report.classes.iter().cloned().chain([OVERALL.to_string()]).collect()
}

pub fn render_text(report: &EvalReport, grid: &EvalGrid, timestamp: bool) -> String {
    let mut out = String::new();
    let width = report
        .classes
        .iter()
        .map(|c| c.len())
        .chain([OVERALL.len()])
        .max()
        .unwrap_or(8)
        .max(10);
    for &metric in &report.metrics {
        out.push_str(metric.title());
        out.push('\n');
        out.push_str(&format!("{:width$}", "difficulty"));
        for &d in &report.difficulties {
            out.push_str(&format!(" {d:>8}"));
        }
        out.push('\n');
        for class in row_labels(report) {
            out.push_str(&format!("{class:width$}"));
            for &d in &report.difficulties {
                let v = report.get(metric, &class, d).unwrap_or(f64::NAN);
                out.push_str(&format!(" {v:>8.2}"));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out.push_str("config: ");
    out.push_str(&serde_json::to_string(&config_json(grid)).unwrap());
    out.push('\n');
    if timestamp {
        out.push_str(&format!("generated_at: {}\n", chrono::Utc::now().to_rfc3339()));
    }
    out
}

pub fn render_json(report: &EvalReport, grid: &EvalGrid, timestamp: bool) -> String {
    let mut metrics = Map::new();
    for &metric in &report.metrics {
        let mut per_class = Map::new();
        for class in row_labels(report) {
            let mut per_diff = Map::new();
            for &d in &report.difficulties {
                if let Some(v) = report.get(metric, &class, d) {
                    per_diff.insert(d.to_string(), json!(v));
                }
            }
            per_class.insert(class, Value::Object(per_diff));
        }
        metrics.insert(metric.key().to_string(), Value::Object(per_class));
    }
    let mut root = Map::new();
    root.insert("metrics".into(), Value::Object(metrics));
    let mut meta = Map::new();
    meta.insert("config".into(), config_json(grid));
    if timestamp {
        meta.insert("generated_at".into(), json!(chrono::Utc::now().to_rfc3339()));
    }
    root.insert("metadata".into(), Value::Object(meta));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).unwrap();
    s.push('\n');
    s
}

pub fn render_csv(report: &EvalReport) -> String {
    let mut out = String::from("metric,class,difficulty,value\n");
    for &metric in &report.metrics {
        for class in row_labels(report) {
            for &d in &report.difficulties {
                if let Some(v) = report.get(metric, &class, d) {
                    out.push_str(&format!("{},{},{},{:.6}\n", metric.key(), class, d, v));
                }
            }
        }
    }
    out
}
