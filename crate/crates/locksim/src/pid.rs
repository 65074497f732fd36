//! PID controller with integral anti-windup.

#[derive(Debug, Clone, Copy)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Integral-term clamp (absolute value of ki * integral).
    pub integral_limit: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Pid {
    integral: f64,
    last_error: Option<f64>,
}

impl Pid {
    pub fn new() -> Self {
        Pid::default()
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.last_error = None;
    }

    /// One deterministic PID update toward a set point of zero.
    pub fn step(&mut self, error: f64, gains: &PidGains, dt: f64) -> f64 {
        assert!(dt > 0.0, "PID needs dt > 0");
        self.integral += error * dt;
        if gains.ki != 0.0 {
            let limit = gains.integral_limit / gains.ki.abs();
            self.integral = self.integral.clamp(-limit, limit);
        }
        let derivative = match self.last_error {
            Some(prev) => (error - prev) / dt,
            None => 0.0,
        };
        self.last_error = Some(error);
        gains.kp * error + gains.ki * self.integral + gains.kd * derivative
    }
}
