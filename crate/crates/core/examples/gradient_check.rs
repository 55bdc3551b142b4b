//! Compares backpropagated gradients with central differences for a
//! network that injects two physics features into layers 2-4.
//!
//! cargo run --release --example gradient_check

use ndarray::{Array1, Array2};
use pgdnn::nn::{InjectionScheme, Network};

fn loss(net: &Network, base: &Array2<f64>, phys: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let r = net.predict_batch(base.view(), phys.view()).unwrap() - y;
    r.dot(&r) / y.len() as f64
}

fn main() -> pgdnn::Result<()> {
    let scheme = InjectionScheme::parse("L2-4")?;
    let mut net = Network::init(scheme, 2, 11)?;
    let base = Array2::from_shape_fn((5, 6), |(i, j)| ((i * 7 + j * 3) % 11) as f64 / 5.0 - 1.0);
    let phys = Array2::from_shape_fn((5, 2), |(i, j)| ((i + 2 * j) % 5) as f64 / 4.0 - 0.5);
    let y = Array1::from_shape_fn(5, |i| i as f64 / 4.0 - 0.5);
    println!("network {scheme}, fan-ins {:?}, {} parameters", net.fan_ins(), net.parameter_count());

    let (_, grads) = net.batch_loss_and_grads(base.view(), phys.view(), y.view())?;
    let h = 1e-5;
    let mut worst = 0.0f64;
    // probe the physics columns of each injected layer plus a base weight
    for layer in [1usize, 2, 3] {
        let cols = net.layers[layer].fan_in();
        for (r, c) in [(0, 0), (3, cols - 2), (7, cols - 1)] {
            let w0 = net.layers[layer].weights[[r, c]];
            net.layers[layer].weights[[r, c]] = w0 + h;
            let up = loss(&net, &base, &phys, &y);
            net.layers[layer].weights[[r, c]] = w0 - h;
            let down = loss(&net, &base, &phys, &y);
            net.layers[layer].weights[[r, c]] = w0;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.layers[layer].weights[[r, c]];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12);
            worst = worst.max(rel);
            println!("layer {} w[{r},{c:>2}] analytic {analytic:+.8e} numeric {numeric:+.8e}", layer + 1);
        }
    }
    println!("worst relative difference {worst:.2e}");
    Ok(())
}
